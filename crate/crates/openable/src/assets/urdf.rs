//! URDF export for articulated objects, plus a small re-import parser used
//! to verify round-trips.
//!
//! Layout: one fixed `base` link, one child link per part, meshes written as
//! OBJ next to the URDF. Revolute links are written in joint-local
//! coordinates (mesh translated by minus the joint origin) so the joint's
//! `<origin>` fully carries the hinge placement.

use super::{ArticulatedObject, MotionType};
use crate::geometry::{Pt3, Vec3};
use crate::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn export_urdf(obj: &ArticulatedObject, out_dir: &Path) -> Result<Vec<PathBuf>> {
    obj.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = Vec::new();

    let base_mesh = out_dir.join("base.obj");
    super::save_mesh(&base_mesh, &obj.base)?;
    manifest.push(base_mesh);

    let urdf_path = out_dir.join("object.urdf");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&urdf_path)?);
    writeln!(w, r#"<?xml version="1.0"?>"#)?;
    writeln!(w, r#"<robot name="object">"#)?;
    writeln!(w, "  <link name=\"base\">")?;
    write_visual(&mut w, "base.obj")?;
    writeln!(w, "  </link>")?;

    for (i, part) in obj.parts.iter().enumerate() {
        let link = format!("part_{i}");
        let mesh_file = format!("{link}.obj");
        let motion = &part.motion;
        let (joint_type, origin, limits) = match motion.motion_type {
            MotionType::Prismatic => {
                let limits = motion.range.unwrap_or_else(|| {
                    // Travel proxy when unset: 90% of the part extent along
                    // the slide axis.
                    let ext = extent_along(&part.mesh, motion.axis);
                    [0.0, 0.9 * ext]
                });
                ("prismatic", Pt3::origin(), limits)
            }
            MotionType::Revolute => {
                let limits = motion
                    .range
                    .unwrap_or([0.0, std::f64::consts::FRAC_PI_2]);
                ("revolute", motion.origin.ok_or(Error::InvalidMotion)?, limits)
            }
        };
        let mut mesh = part.mesh.clone();
        mesh.transform(&nalgebra::Rotation3::identity(), -origin.coords);
        let mesh_path = out_dir.join(&mesh_file);
        super::save_mesh(&mesh_path, &mesh)?;
        manifest.push(mesh_path);

        writeln!(w, "  <link name=\"{link}\">")?;
        write_visual(&mut w, &mesh_file)?;
        writeln!(w, "  </link>")?;
        writeln!(
            w,
            "  <joint name=\"{link}_joint\" type=\"{joint_type}\">"
        )?;
        writeln!(w, "    <parent link=\"base\"/>")?;
        writeln!(w, "    <child link=\"{link}\"/>")?;
        writeln!(
            w,
            "    <origin xyz=\"{} {} {}\" rpy=\"0 0 0\"/>",
            origin.x, origin.y, origin.z
        )?;
        writeln!(
            w,
            "    <axis xyz=\"{} {} {}\"/>",
            motion.axis.x, motion.axis.y, motion.axis.z
        )?;
        writeln!(
            w,
            "    <limit lower=\"{}\" upper=\"{}\" effort=\"10\" velocity=\"1\"/>",
            limits[0], limits[1]
        )?;
        writeln!(w, "  </joint>")?;
    }
    writeln!(w, "</robot>")?;
    drop(w);
    manifest.push(urdf_path);
    Ok(manifest)
}

fn write_visual<W: Write>(w: &mut W, mesh_file: &str) -> Result<()> {
    writeln!(w, "    <visual>")?;
    writeln!(w, "      <geometry>")?;
    writeln!(w, "        <mesh filename=\"{mesh_file}\"/>")?;
    writeln!(w, "      </geometry>")?;
    writeln!(w, "    </visual>")?;
    writeln!(w, "    <collision>")?;
    writeln!(w, "      <geometry>")?;
    writeln!(w, "        <mesh filename=\"{mesh_file}\"/>")?;
    writeln!(w, "      </geometry>")?;
    writeln!(w, "    </collision>")?;
    Ok(())
}

fn extent_along(mesh: &crate::geometry::TriMesh, axis: Vec3) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in &mesh.vertices {
        let c = v.coords.dot(&axis);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (hi - lo).max(0.0)
}

/// Joint parameters recovered from a URDF file.
#[derive(Debug, Clone, PartialEq)]
pub struct UrdfJoint {
    pub name: String,
    pub joint_type: String,
    pub origin: Pt3,
    pub axis: Vec3,
    pub limits: [f64; 2],
}

/// Parse the `<joint>` elements we write. Not a general URDF reader: it
/// assumes attribute values carry no embedded `>` and joints are not nested.
pub fn import_urdf_joints(path: &Path) -> Result<Vec<UrdfJoint>> {
    let text = std::fs::read_to_string(path)?;
    let mut joints = Vec::new();
    let mut rest = text.as_str();
    while let Some(start) = rest.find("<joint") {
        let after = &rest[start..];
        let end = after.find("</joint>").ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            reason: "unterminated <joint>".into(),
        })?;
        let block = &after[..end];
        let attr = |tag: &str, name: &str| -> Option<String> {
            let scope = if tag.is_empty() {
                block
            } else {
                let p = block.find(&format!("<{tag}"))?;
                let s = &block[p..];
                &s[..s.find("/>").or_else(|| s.find('>'))?]
            };
            let key = format!("{name}=\"");
            let p = scope.find(&key)? + key.len();
            let s = &scope[p..];
            Some(s[..s.find('"')?].to_string())
        };
        let vec3 = |s: &str| -> Option<[f64; 3]> {
            let v: Vec<f64> = s.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            v.try_into().ok()
        };
        let bad = |what: &str| Error::Parse {
            path: path.to_path_buf(),
            reason: format!("joint missing {what}"),
        };
        let name = attr("", "name").ok_or_else(|| bad("name"))?;
        let joint_type = attr("", "type").ok_or_else(|| bad("type"))?;
        let origin = attr("origin", "xyz")
            .and_then(|s| vec3(&s))
            .map(Pt3::from)
            .unwrap_or_else(Pt3::origin);
        let axis = attr("axis", "xyz")
            .and_then(|s| vec3(&s))
            .map(Vec3::from)
            .ok_or_else(|| bad("axis"))?;
        let limits = [
            attr("limit", "lower").and_then(|s| s.parse().ok()).unwrap_or(0.0),
            attr("limit", "upper").and_then(|s| s.parse().ok()).unwrap_or(0.0),
        ];
        joints.push(UrdfJoint {
            name,
            joint_type,
            origin,
            axis,
            limits,
        });
        rest = &after[end + 8..];
    }
    Ok(joints)
}
