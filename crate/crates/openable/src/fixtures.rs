//! Procedural furniture fixtures with exact ground truth.
//!
//! Everything here is built from axis-aligned slabs in the canonical frame
//! (z up, x front), so ground-truth segmentations, motion axes, and hinge
//! origins are known in closed form. Used by tests and the examples.

use crate::assets::{MotionSpec, PartInstance, PartLabel, PartSegmentation};
use crate::geometry::{Frame, Pt3, TriMesh, Vec3};
use std::collections::BTreeSet;

/// Axis-aligned unit cube [0,1]^3, 12 triangles, outward winding.
pub fn unit_cube() -> TriMesh {
    box_mesh(Pt3::new(0.5, 0.5, 0.5), Vec3::new(0.5, 0.5, 0.5))
}

/// Axis-aligned box given center and half extents; 12 triangles.
pub fn box_mesh(center: Pt3, half: Vec3) -> TriMesh {
    grid_box(center, half, [1, 1, 1])
}

/// Axis-aligned box with each face subdivided into a grid. `divs` gives the
/// number of cells along (x, y, z). Faces are emitted as separate vertex
/// sheets (no welding across edges); winding is outward.
pub fn grid_box(center: Pt3, half: Vec3, divs: [usize; 3]) -> TriMesh {
    let mut mesh = TriMesh::default();
    let min = center - half;
    let max = center + half;
    // (fixed axis, max side?, axis u, axis v) chosen so u×v points outward.
    let faces: [(usize, bool, usize, usize); 6] = [
        (0, false, 2, 1), // -x
        (0, true, 1, 2),  // +x
        (1, false, 0, 2), // -y
        (1, true, 2, 0),  // +y
        (2, false, 1, 0), // -z
        (2, true, 0, 1),  // +z
    ];
    for (axis, positive, ua, va) in faces {
        let nu = divs[ua].max(1);
        let nv = divs[va].max(1);
        let base = mesh.vertices.len() as u32;
        for j in 0..=nv {
            for i in 0..=nu {
                let mut p = Pt3::origin();
                p[axis] = if positive { max[axis] } else { min[axis] };
                p[ua] = min[ua] + (max[ua] - min[ua]) * i as f64 / nu as f64;
                p[va] = min[va] + (max[va] - min[va]) * j as f64 / nv as f64;
                mesh.vertices.push(p);
            }
        }
        let stride = (nu + 1) as u32;
        for j in 0..nv as u32 {
            for i in 0..nu as u32 {
                let a = base + j * stride + i;
                let b = a + 1;
                let c = a + stride;
                let d = c + 1;
                mesh.triangles.push([a, b, d]);
                mesh.triangles.push([a, d, c]);
            }
        }
    }
    mesh
}

/// A procedural furniture piece with exact ground truth.
#[derive(Debug, Clone)]
pub struct Furniture {
    pub name: String,
    pub mesh: TriMesh,
    pub seg: PartSegmentation,
    pub frame: Frame,
}

impl Furniture {
    /// Apply a rigid yaw+translation; ground-truth motions transform along.
    pub fn transformed(&self, yaw: f64, translation: Vec3) -> Furniture {
        let rot = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), yaw);
        let mut mesh = self.mesh.clone();
        mesh.transform(&rot, translation);
        let mut seg = self.seg.clone();
        for part in &mut seg.parts {
            if let Some(m) = &mut part.motion {
                m.axis = rot * m.axis;
                if let Some(o) = &mut m.origin {
                    *o = rot * *o + translation;
                }
            }
        }
        Furniture {
            name: format!("{}_yaw", self.name),
            mesh,
            seg,
            frame: self.frame,
        }
    }

    /// Uniform scale; origins and ranges scale, axes do not.
    pub fn scaled(&self, s: f64) -> Furniture {
        let mut mesh = self.mesh.clone();
        mesh.scale(s);
        let mut seg = self.seg.clone();
        for part in &mut seg.parts {
            if let Some(m) = &mut part.motion {
                if let Some(o) = &mut m.origin {
                    o.coords *= s;
                }
                if m.motion_type == crate::assets::MotionType::Prismatic {
                    if let Some(r) = &mut m.range {
                        r[0] *= s;
                        r[1] *= s;
                    }
                }
            }
        }
        Furniture {
            name: format!("{}_scaled", self.name),
            mesh,
            seg,
            frame: self.frame,
        }
    }
}

/// Which side of a door carries the handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandleSide {
    Left,
    Right,
    Top,
    None,
}

const WALL: f64 = 0.02;

/// Five-wall shell (open front): back, left, right, bottom, top.
/// Dimensions: depth along x, width along y, height along z; front at +x,
/// resting on z = 0.
pub(crate) fn open_front_shell(mesh: &mut TriMesh, w: f64, d: f64, h: f64) {
    let t = WALL;
    for half in [
        // back
        (Pt3::new(-d / 2.0 + t / 2.0, 0.0, h / 2.0), Vec3::new(t / 2.0, w / 2.0, h / 2.0)),
        // left / right
        (Pt3::new(0.0, -w / 2.0 + t / 2.0, h / 2.0), Vec3::new(d / 2.0, t / 2.0, h / 2.0)),
        (Pt3::new(0.0, w / 2.0 - t / 2.0, h / 2.0), Vec3::new(d / 2.0, t / 2.0, h / 2.0)),
        // bottom / top
        (Pt3::new(0.0, 0.0, t / 2.0), Vec3::new(d / 2.0, w / 2.0, t / 2.0)),
        (Pt3::new(0.0, 0.0, h - t / 2.0), Vec3::new(d / 2.0, w / 2.0, t / 2.0)),
    ] {
        mesh.append(&box_mesh(half.0, half.1));
    }
}

/// Open-top shell: back, front, left, right, bottom.
pub(crate) fn open_top_shell(mesh: &mut TriMesh, w: f64, d: f64, h: f64) {
    let t = WALL;
    for half in [
        (Pt3::new(-d / 2.0 + t / 2.0, 0.0, h / 2.0), Vec3::new(t / 2.0, w / 2.0, h / 2.0)),
        (Pt3::new(d / 2.0 - t / 2.0, 0.0, h / 2.0), Vec3::new(t / 2.0, w / 2.0, h / 2.0)),
        (Pt3::new(0.0, -w / 2.0 + t / 2.0, h / 2.0), Vec3::new(d / 2.0, t / 2.0, h / 2.0)),
        (Pt3::new(0.0, w / 2.0 - t / 2.0, h / 2.0), Vec3::new(d / 2.0, t / 2.0, h / 2.0)),
        (Pt3::new(0.0, 0.0, t / 2.0), Vec3::new(d / 2.0, w / 2.0, t / 2.0)),
    ] {
        mesh.append(&box_mesh(half.0, half.1));
    }
}

fn knob_mesh(center: Pt3, half: Vec3) -> TriMesh {
    box_mesh(center, half)
}

fn part(
    id: &str,
    label: PartLabel,
    tris: BTreeSet<usize>,
    motion: MotionSpec,
) -> PartInstance {
    PartInstance {
        id: id.into(),
        label,
        triangle_ids: tris,
        confidence: 1.0,
        motion: Some(motion),
    }
}

/// Dresser: open-front shell with `n` stacked drawer fronts (knob centered on
/// each). Ground truth: prismatic along +x.
pub fn dresser(n: usize, w: f64, d: f64, h: f64) -> Furniture {
    assert!(n >= 1);
    let mut mesh = TriMesh::default();
    open_front_shell(&mut mesh, w, d, h);
    let gap = 0.02;
    let front_t = 0.03;
    let knob_len = 0.04;
    let fh = (h - gap * (n as f64 + 1.0)) / n as f64;
    let mut parts = Vec::new();
    for i in 0..n {
        let z0 = gap + (fh + gap) * i as f64;
        let zc = z0 + fh / 2.0;
        let mut tris = BTreeSet::new();
        let slab = grid_box(
            Pt3::new(d / 2.0 - front_t / 2.0, 0.0, zc),
            Vec3::new(front_t / 2.0, w / 2.0 - 0.05, fh / 2.0),
            [1, 3, 2],
        );
        tris.extend(mesh.append(&slab));
        let knob = knob_mesh(
            Pt3::new(d / 2.0 + knob_len / 2.0, 0.0, zc),
            Vec3::new(knob_len / 2.0, 0.02, 0.02),
        );
        tris.extend(mesh.append(&knob));
        parts.push(part(
            &format!("drawer_{i}"),
            PartLabel::Drawer,
            tris,
            MotionSpec::prismatic(Vec3::x(), None),
        ));
    }
    let seg = PartSegmentation::from_parts(parts, mesh.triangles.len()).unwrap();
    Furniture {
        name: format!("dresser_{n}_{w:.2}x{d:.2}x{h:.2}"),
        mesh,
        seg,
        frame: Frame::canonical(),
    }
}

/// Single-door cabinet. The door sits just inside the front plane; the knob
/// protrudes forward on the given side, so the hinge is the opposite edge of
/// the door's back face. With `HandleSide::None` the hinge falls to the
/// vertical edge farther from the cabinet's lateral center (the -y edge,
/// since the handle-free door is nudged toward -y).
pub fn door_cabinet(handle: HandleSide, w: f64, d: f64, h: f64) -> Furniture {
    let mut mesh = TriMesh::default();
    open_front_shell(&mut mesh, w, d, h);
    let t = 0.02; // door thickness
    let m = 0.05; // margin to the shell edges
    let k = 0.05; // knob protrusion
    let (dw, dh) = (w / 2.0 - m, (h - 2.0 * m) / 2.0); // door half extents
    // Handle-free doors get offset so the lateral-center fallback is
    // unambiguous.
    let yc = if handle == HandleSide::None { -0.03 } else { 0.0 };
    let zc = h / 2.0;
    let mut tris = BTreeSet::new();
    let slab = grid_box(
        Pt3::new(d / 2.0 - t / 2.0, yc, zc),
        Vec3::new(t / 2.0, dw, dh),
        [1, 5, 5],
    );
    tris.extend(mesh.append(&slab));

    let (knob_pos, back_x) = (
        match handle {
            HandleSide::Left => Some(Pt3::new(d / 2.0 + k / 2.0, yc - dw + 0.1, zc)),
            HandleSide::Right => Some(Pt3::new(d / 2.0 + k / 2.0, yc + dw - 0.1, zc)),
            HandleSide::Top => Some(Pt3::new(d / 2.0 + k / 2.0, yc, zc + dh - 0.1)),
            HandleSide::None => None,
        },
        d / 2.0 - t,
    );
    if let Some(p) = knob_pos {
        tris.extend(mesh.append(&knob_mesh(p, Vec3::new(k / 2.0, 0.02, 0.02))));
    }

    // Hinge edge opposite the handle, on the door's back face (the knob pushes
    // the bounding box forward, so the back face hugs the shell edges). A
    // handle-free door is flush with the shell opening: its front face lies in
    // the opening plane, and the hinge falls on the front -y edge, the
    // vertical edge farther from the lateral center (door nudged toward -y).
    let (origin, axis) = match handle {
        HandleSide::Left => (Pt3::new(back_x, yc + dw, zc), Vec3::z()),
        HandleSide::Right => (Pt3::new(back_x, yc - dw, zc), -Vec3::z()),
        HandleSide::None => (Pt3::new(d / 2.0, yc - dw, zc), -Vec3::z()),
        HandleSide::Top => (Pt3::new(back_x, yc, zc - dh), Vec3::y()),
    };
    let seg = PartSegmentation::from_parts(
        vec![part(
            "door_0",
            PartLabel::Door,
            tris,
            MotionSpec::revolute(axis, origin, Some([0.0, std::f64::consts::FRAC_PI_2])),
        )],
        mesh.triangles.len(),
    )
    .unwrap();
    Furniture {
        name: format!("cabinet_{handle:?}_{w:.2}x{d:.2}x{h:.2}"),
        mesh,
        seg,
        frame: Frame::canonical(),
    }
}

/// Two handle-free doors meeting at the middle; each hinges on its outer
/// vertical edge (the one farther from the lateral center).
pub fn double_door_cabinet(w: f64, d: f64, h: f64) -> Furniture {
    let mut mesh = TriMesh::default();
    open_front_shell(&mut mesh, w, d, h);
    let t = 0.02;
    let m = 0.05;
    let gap = 0.01;
    let dw = (w / 2.0 - m - gap) / 2.0; // half width of each door
    let dh = (h - 2.0 * m) / 2.0;
    let zc = h / 2.0;
    let mut parts = Vec::new();
    for (i, side) in [-1.0f64, 1.0].iter().enumerate() {
        let yc = side * (dw + gap);
        let mut tris = BTreeSet::new();
        let slab = grid_box(
            Pt3::new(d / 2.0 - t / 2.0, yc, zc),
            Vec3::new(t / 2.0, dw, dh),
            [1, 5, 5],
        );
        tris.extend(mesh.append(&slab));
        let outer = yc + side * dw;
        let axis = if *side < 0.0 { -Vec3::z() } else { Vec3::z() };
        parts.push(part(
            &format!("door_{i}"),
            PartLabel::Door,
            tris,
            MotionSpec::revolute(
                axis,
                // Handle-free flush doors hinge on the front face edge.
                Pt3::new(d / 2.0, outer, zc),
                Some([0.0, std::f64::consts::FRAC_PI_2]),
            ),
        ));
    }
    let seg = PartSegmentation::from_parts(parts, mesh.triangles.len()).unwrap();
    Furniture {
        name: format!("double_door_{w:.2}x{d:.2}x{h:.2}"),
        mesh,
        seg,
        frame: Frame::canonical(),
    }
}

/// Chest with a lid: open-top shell, lid flush at the back with a small
/// front overhang. Without a latch the hinge is the lid's top back edge (the
/// handle-free fallback); with a latch high on the front lip, the bottom
/// back edge ends up farthest from the handle and wins.
pub fn chest(latch: bool, w: f64, d: f64, h: f64) -> Furniture {
    let mut mesh = TriMesh::default();
    open_top_shell(&mut mesh, w, d, h);
    let t = 0.06; // lid thickness
    let lip = 0.03; // front overhang
    let lid_front = d / 2.0 + lip;
    let lid_cx = (lid_front + (-d / 2.0)) / 2.0;
    let lid_hd = (lid_front + d / 2.0) / 2.0;
    let zc = h + t / 2.0;
    let mut tris = BTreeSet::new();
    let slab = grid_box(
        Pt3::new(lid_cx, 0.0, zc),
        Vec3::new(lid_hd, w / 2.0, t / 2.0),
        [5, 5, 1],
    );
    tris.extend(mesh.append(&slab));
    if latch {
        // High on the front lip, so it sits above the lid's vertical middle.
        let lz = h + t * 0.75;
        tris.extend(mesh.append(&knob_mesh(
            Pt3::new(lid_front + 0.02, 0.0, lz),
            Vec3::new(0.02, 0.02, t * 0.2),
        )));
    }
    let (origin_z, _note) = if latch {
        (h, "bottom back edge: farthest from the high latch")
    } else {
        (h + t, "top back edge: handle-free lid fallback")
    };
    let seg = PartSegmentation::from_parts(
        vec![part(
            "lid_0",
            PartLabel::Lid,
            tris,
            MotionSpec::revolute(
                -Vec3::y(),
                Pt3::new(-d / 2.0, 0.0, origin_z),
                Some([0.0, std::f64::consts::FRAC_PI_2]),
            ),
        )],
        mesh.triangles.len(),
    )
    .unwrap();
    Furniture {
        name: format!("chest{}_{w:.2}x{d:.2}x{h:.2}", if latch { "_latch" } else { "" }),
        mesh,
        seg,
        frame: Frame::canonical(),
    }
}

/// The standard procedural suite: 30+ objects across all part types, sizes,
/// and handle placements.
/// Corner cabinet: a single drawer front over a cavity that is shallow at
/// the sides (filler walls) but runs deep into the corner at the center.
/// Ground truth: prismatic along +x.
pub fn corner_cabinet(w: f64, d: f64, h: f64) -> Furniture {
    let mut mesh = TriMesh::default();
    open_front_shell(&mut mesh, w, d, h);
    let front_t = 0.03;
    let knob_len = 0.04;
    let hw = w / 2.0 - 0.05;
    let zc = h / 2.0;
    // Shallow filler walls behind the outer thirds of the front; the center
    // channel stays open to the back wall.
    let wall_x = d / 2.0 - front_t - 0.25;
    for s in [-1.0, 1.0] {
        mesh.append(&box_mesh(
            Pt3::new(wall_x - WALL / 2.0, s * (w / 2.0 - 0.25 / 2.0 - WALL), zc),
            Vec3::new(WALL / 2.0, 0.25 / 2.0, h / 2.0 - WALL),
        ));
    }
    let mut tris = BTreeSet::new();
    let slab = grid_box(
        Pt3::new(d / 2.0 - front_t / 2.0, 0.0, zc),
        Vec3::new(front_t / 2.0, hw, h / 2.0 - 0.05),
        [1, 3, 2],
    );
    tris.extend(mesh.append(&slab));
    let knob = knob_mesh(
        Pt3::new(d / 2.0 + knob_len / 2.0, 0.0, zc),
        Vec3::new(knob_len / 2.0, 0.02, 0.02),
    );
    tris.extend(mesh.append(&knob));
    let seg = PartSegmentation::from_parts(
        vec![part(
            "drawer_0",
            PartLabel::Drawer,
            tris,
            MotionSpec::prismatic(Vec3::x(), None),
        )],
        mesh.triangles.len(),
    )
    .unwrap();
    Furniture {
        name: format!("corner_cabinet_{w:.2}x{d:.2}x{h:.2}"),
        mesh,
        seg,
        frame: Frame::canonical(),
    }
}

pub fn fixture_suite() -> Vec<Furniture> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push(dresser(n, 1.0, 0.6, 1.1));
    }
    for (w, d, h) in [(0.8, 0.5, 0.9), (1.2, 0.7, 1.4), (0.9, 0.45, 2.0)] {
        out.push(dresser(3, w, d, h));
    }
    for side in [HandleSide::Left, HandleSide::Right, HandleSide::Top, HandleSide::None] {
        for (w, d, h) in [(0.8, 0.6, 1.0), (1.0, 0.5, 1.6), (0.7, 0.4, 0.9)] {
            out.push(door_cabinet(side, w, d, h));
        }
    }
    for (w, d, h) in [(1.2, 0.6, 1.0), (1.6, 0.5, 1.2), (1.0, 0.45, 0.8)] {
        out.push(double_door_cabinet(w, d, h));
    }
    for latch in [false, true] {
        for (w, d, h) in [(0.9, 0.6, 0.5), (1.2, 0.7, 0.6), (0.7, 0.5, 0.45)] {
            out.push(chest(latch, w, d, h));
        }
    }
    out.push(corner_cabinet(1.0, 0.6, 0.9));
    out
}
