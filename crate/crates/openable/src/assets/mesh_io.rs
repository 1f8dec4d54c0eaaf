//! Mesh loading and saving: OBJ, PLY (ascii + binary little-endian), and a
//! minimal glTF/GLB reader (positions, indices, vertex colors, UVs).

use crate::geometry::{Pt3, TriMesh, Vec3};
use crate::{Error, Result};
use std::io::Write;
use std::path::Path;

pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let mesh = match ext.as_str() {
        "obj" => load_obj(path)?,
        "ply" => load_ply(path)?,
        "glb" | "gltf" => load_gltf(path)?,
        other => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                reason: format!("unsupported mesh extension {other:?}"),
            })
        }
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Write a mesh as `.obj` or `.ply`, chosen by extension.
pub fn save_mesh(path: &Path, mesh: &TriMesh) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "obj" => save_obj(path, mesh),
        "ply" => save_ply(path, mesh),
        other => Err(Error::Parse {
            path: path.to_path_buf(),
            reason: format!("unsupported output extension {other:?}"),
        }),
    }
}

fn parse_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------- OBJ

fn load_obj(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path)?;
    let mut positions: Vec<Pt3> = Vec::new();
    let mut colors: Vec<Option<[f32; 3]>> = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();
    let mut uvs: Vec<[f32; 2]> = Vec::new();
    let mut any_color = false;

    // Unified (v, vt, vn) triple -> output vertex index.
    let mut remap: std::collections::HashMap<(usize, Option<usize>, Option<usize>), u32> =
        std::collections::HashMap::new();
    let mut mesh = TriMesh::default();
    let mut out_normals: Vec<Vec3> = Vec::new();
    let mut out_uvs: Vec<[f32; 2]> = Vec::new();
    let mut out_colors: Vec<[f32; 3]> = Vec::new();
    let mut any_normal = false;
    let mut any_uv = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap();
        let bad = |what: &str| parse_err(path, format!("line {}: bad {what}", lineno + 1));
        match tag {
            "v" => {
                let nums: Vec<f64> = it.map(|s| s.parse()).collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("vertex"))?;
                if nums.len() < 3 {
                    return Err(bad("vertex"));
                }
                positions.push(Pt3::new(nums[0], nums[1], nums[2]));
                if nums.len() >= 6 {
                    colors.push(Some([nums[3] as f32, nums[4] as f32, nums[5] as f32]));
                    any_color = true;
                } else {
                    colors.push(None);
                }
            }
            "vn" => {
                let nums: Vec<f64> = it.map(|s| s.parse()).collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("normal"))?;
                if nums.len() != 3 {
                    return Err(bad("normal"));
                }
                normals.push(Vec3::new(nums[0], nums[1], nums[2]));
            }
            "vt" => {
                let nums: Vec<f64> = it.map(|s| s.parse()).collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("texcoord"))?;
                if nums.len() < 2 {
                    return Err(bad("texcoord"));
                }
                uvs.push([nums[0] as f32, nums[1] as f32]);
            }
            "f" => {
                let corners: Vec<&str> = it.collect();
                if corners.len() > 4 {
                    return Err(Error::UnsupportedFace(corners.len()));
                }
                if corners.len() < 3 {
                    return Err(bad("face"));
                }
                let mut ids = Vec::with_capacity(corners.len());
                for c in &corners {
                    let mut fields = c.split('/');
                    let vi = resolve_index(fields.next(), positions.len())
                        .ok_or_else(|| bad("face index"))?;
                    let ti = match fields.next() {
                        None | Some("") => None,
                        s => Some(resolve_index(s, uvs.len()).ok_or_else(|| bad("face index"))?),
                    };
                    let ni = match fields.next() {
                        None | Some("") => None,
                        s => Some(resolve_index(s, normals.len()).ok_or_else(|| bad("face index"))?),
                    };
                    let key = (vi, ti, ni);
                    let idx = *remap.entry(key).or_insert_with(|| {
                        mesh.vertices.push(positions[vi]);
                        out_colors.push(colors[vi].unwrap_or([0.0; 3]));
                        out_uvs.push(ti.map(|t| uvs[t]).unwrap_or([0.0; 2]));
                        out_normals.push(ni.map(|n| normals[n]).unwrap_or_else(Vec3::zeros));
                        if ni.is_some() {
                            any_normal = true;
                        }
                        if ti.is_some() {
                            any_uv = true;
                        }
                        (mesh.vertices.len() - 1) as u32
                    });
                    ids.push(idx);
                }
                // Fan triangulation for quads: (0,1,2) + (0,2,3).
                for k in 1..ids.len() - 1 {
                    mesh.triangles.push([ids[0], ids[k], ids[k + 1]]);
                }
            }
            // Materials, groups, smoothing: irrelevant here.
            _ => {}
        }
    }
    if any_normal {
        mesh.normals = Some(out_normals);
    }
    if any_uv {
        mesh.uvs = Some(out_uvs);
    }
    if any_color {
        mesh.colors = Some(out_colors);
    }
    Ok(mesh)
}

/// OBJ indices are 1-based; negative counts back from the end.
fn resolve_index(field: Option<&str>, len: usize) -> Option<usize> {
    let i: i64 = field?.parse().ok()?;
    let idx = if i > 0 {
        i - 1
    } else if i < 0 {
        len as i64 + i
    } else {
        return None;
    };
    if (0..len as i64).contains(&idx) {
        Some(idx as usize)
    } else {
        None
    }
}

fn save_obj(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (i, v) in mesh.vertices.iter().enumerate() {
        if let Some(colors) = &mesh.colors {
            let c = colors[i];
            writeln!(w, "v {} {} {} {} {} {}", v.x, v.y, v.z, c[0], c[1], c[2])?;
        } else {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
    }
    if let Some(uvs) = &mesh.uvs {
        for t in uvs {
            writeln!(w, "vt {} {}", t[0], t[1])?;
        }
    }
    if let Some(normals) = &mesh.normals {
        for n in normals {
            writeln!(w, "vn {} {} {}", n.x, n.y, n.z)?;
        }
    }
    let has_uv = mesh.uvs.is_some();
    let has_n = mesh.normals.is_some();
    for tri in &mesh.triangles {
        write!(w, "f")?;
        for &v in tri {
            let i = v + 1;
            match (has_uv, has_n) {
                (false, false) => write!(w, " {i}")?,
                (true, false) => write!(w, " {i}/{i}")?,
                (false, true) => write!(w, " {i}//{i}")?,
                (true, true) => write!(w, " {i}/{i}/{i}")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- PLY

#[derive(Clone, Copy, PartialEq)]
enum PlyType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyType {
    fn parse(s: &str) -> Option<PlyType> {
        Some(match s {
            "char" | "int8" => PlyType::I8,
            "uchar" | "uint8" => PlyType::U8,
            "short" | "int16" => PlyType::I16,
            "ushort" | "uint16" => PlyType::U16,
            "int" | "int32" => PlyType::I32,
            "uint" | "uint32" => PlyType::U32,
            "float" | "float32" => PlyType::F32,
            "double" | "float64" => PlyType::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            PlyType::I8 | PlyType::U8 => 1,
            PlyType::I16 | PlyType::U16 => 2,
            PlyType::I32 | PlyType::U32 | PlyType::F32 => 4,
            PlyType::F64 => 8,
        }
    }

    fn read(self, bytes: &[u8]) -> f64 {
        match self {
            PlyType::I8 => bytes[0] as i8 as f64,
            PlyType::U8 => bytes[0] as f64,
            PlyType::I16 => i16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyType::U16 => u16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyType::I32 => i32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyType::U32 => u32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyType::F32 => f32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            PlyType::F64 => f64::from_le_bytes(bytes[..8].try_into().unwrap()),
        }
    }
}

struct PlyProperty {
    name: String,
    ty: PlyType,
    /// Count type for list properties.
    list: Option<PlyType>,
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

pub(crate) struct PlyFile {
    pub elements: Vec<(String, Vec<Vec<Vec<f64>>>)>,
    pub names: Vec<Vec<String>>,
}

impl PlyFile {
    pub fn element(&self, name: &str) -> Option<(&[String], &[Vec<Vec<f64>>])> {
        self.elements
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| (self.names[i].as_slice(), self.elements[i].1.as_slice()))
    }
}

/// Parse any ascii or binary little-endian PLY into per-element rows of
/// per-property value lists (scalars are one-element lists).
pub(crate) fn read_ply(path: &Path) -> Result<PlyFile> {
    let data = std::fs::read(path)?;
    let header_end = find_header_end(&data)
        .ok_or_else(|| parse_err(path, "missing end_header"))?;
    let header = std::str::from_utf8(&data[..header_end])
        .map_err(|_| parse_err(path, "header is not utf-8"))?;
    let mut lines = header.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(parse_err(path, "missing ply magic"));
    }
    let mut binary = false;
    let mut elements: Vec<PlyElement> = Vec::new();
    for line in lines {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("format") => match it.next() {
                Some("ascii") => binary = false,
                Some("binary_little_endian") => binary = true,
                other => {
                    return Err(parse_err(path, format!("unsupported format {other:?}")))
                }
            },
            Some("element") => {
                let name = it.next().ok_or_else(|| parse_err(path, "bad element"))?;
                let count: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(path, "bad element count"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(path, "property before element"))?;
                let first = it.next().ok_or_else(|| parse_err(path, "bad property"))?;
                if first == "list" {
                    let count_ty = it
                        .next()
                        .and_then(PlyType::parse)
                        .ok_or_else(|| parse_err(path, "bad list count type"))?;
                    let ty = it
                        .next()
                        .and_then(PlyType::parse)
                        .ok_or_else(|| parse_err(path, "bad list value type"))?;
                    let name = it.next().ok_or_else(|| parse_err(path, "bad property"))?;
                    el.properties.push(PlyProperty {
                        name: name.to_string(),
                        ty,
                        list: Some(count_ty),
                    });
                } else {
                    let ty = PlyType::parse(first)
                        .ok_or_else(|| parse_err(path, format!("unknown type {first:?}")))?;
                    let name = it.next().ok_or_else(|| parse_err(path, "bad property"))?;
                    el.properties.push(PlyProperty {
                        name: name.to_string(),
                        ty,
                        list: None,
                    });
                }
            }
            Some("comment") | Some("obj_info") | Some("end_header") | None => {}
            Some(other) => {
                return Err(parse_err(path, format!("unknown header line {other:?}")))
            }
        }
    }

    let body = &data[header_end..];
    let mut out = PlyFile {
        elements: Vec::new(),
        names: Vec::new(),
    };
    if binary {
        let mut pos = 0usize;
        for el in &elements {
            let mut rows = Vec::with_capacity(el.count);
            for _ in 0..el.count {
                let mut row = Vec::with_capacity(el.properties.len());
                for p in &el.properties {
                    let n = if let Some(ct) = p.list {
                        let c = ct.read(body.get(pos..pos + ct.size()).ok_or_else(|| {
                            parse_err(path, "truncated binary body")
                        })?) as usize;
                        pos += ct.size();
                        c
                    } else {
                        1
                    };
                    let mut vals = Vec::with_capacity(n);
                    for _ in 0..n {
                        let sz = p.ty.size();
                        let b = body
                            .get(pos..pos + sz)
                            .ok_or_else(|| parse_err(path, "truncated binary body"))?;
                        vals.push(p.ty.read(b));
                        pos += sz;
                    }
                    row.push(vals);
                }
                rows.push(row);
            }
            out.names
                .push(el.properties.iter().map(|p| p.name.clone()).collect());
            out.elements.push((el.name.clone(), rows));
        }
    } else {
        let text = std::str::from_utf8(body).map_err(|_| parse_err(path, "body not utf-8"))?;
        let mut tokens = text.split_whitespace().map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(path, format!("bad number {t:?}")))
        });
        let mut next = |p: &Path| -> Result<f64> {
            tokens
                .next()
                .ok_or_else(|| parse_err(p, "truncated ascii body"))?
        };
        for el in &elements {
            let mut rows = Vec::with_capacity(el.count);
            for _ in 0..el.count {
                let mut row = Vec::with_capacity(el.properties.len());
                for p in &el.properties {
                    let n = if p.list.is_some() {
                        next(path)? as usize
                    } else {
                        1
                    };
                    let mut vals = Vec::with_capacity(n);
                    for _ in 0..n {
                        vals.push(next(path)?);
                    }
                    row.push(vals);
                }
                rows.push(row);
            }
            out.names
                .push(el.properties.iter().map(|p| p.name.clone()).collect());
            out.elements.push((el.name.clone(), rows));
        }
    }
    Ok(out)
}

fn find_header_end(data: &[u8]) -> Option<usize> {
    let needle = b"end_header";
    let pos = data
        .windows(needle.len())
        .position(|w| w == needle)?;
    let mut end = pos + needle.len();
    // Swallow the line terminator (\n or \r\n).
    if data.get(end) == Some(&b'\r') {
        end += 1;
    }
    if data.get(end) == Some(&b'\n') {
        end += 1;
    }
    Some(end)
}

fn load_ply(path: &Path) -> Result<TriMesh> {
    let ply = read_ply(path)?;
    let (vnames, vrows) = ply
        .element("vertex")
        .ok_or_else(|| parse_err(path, "no vertex element"))?;
    let find = |n: &str| vnames.iter().position(|s| s == n);
    let (xi, yi, zi) = match (find("x"), find("y"), find("z")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(parse_err(path, "vertex element lacks x/y/z")),
    };
    let nrm = match (find("nx"), find("ny"), find("nz")) {
        (Some(a), Some(b), Some(c)) => Some((a, b, c)),
        _ => None,
    };
    let col = match (find("red"), find("green"), find("blue")) {
        (Some(a), Some(b), Some(c)) => Some((a, b, c, true)),
        _ => match (find("r"), find("g"), find("b")) {
            (Some(a), Some(b), Some(c)) => Some((a, b, c, false)),
            _ => None,
        },
    };
    let uv = match (find("s"), find("t")) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => match (find("u"), find("v")) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        },
    };

    let mut mesh = TriMesh::default();
    for row in vrows {
        mesh.vertices.push(Pt3::new(row[xi][0], row[yi][0], row[zi][0]));
    }
    if let Some((a, b, c)) = nrm {
        mesh.normals = Some(
            vrows
                .iter()
                .map(|r| Vec3::new(r[a][0], r[b][0], r[c][0]))
                .collect(),
        );
    }
    if let Some((a, b, c, byte_scale)) = col {
        let s = if byte_scale { 1.0 / 255.0 } else { 1.0 };
        mesh.colors = Some(
            vrows
                .iter()
                .map(|r| {
                    [
                        (r[a][0] * s) as f32,
                        (r[b][0] * s) as f32,
                        (r[c][0] * s) as f32,
                    ]
                })
                .collect(),
        );
    }
    if let Some((a, b)) = uv {
        mesh.uvs = Some(
            vrows
                .iter()
                .map(|r| [r[a][0] as f32, r[b][0] as f32])
                .collect(),
        );
    }

    if let Some((fnames, frows)) = ply.element("face") {
        let fi = fnames
            .iter()
            .position(|n| n == "vertex_indices" || n == "vertex_index")
            .ok_or_else(|| parse_err(path, "face element lacks vertex_indices"))?;
        for row in frows {
            let idx = &row[fi];
            if idx.len() > 4 {
                return Err(Error::UnsupportedFace(idx.len()));
            }
            if idx.len() < 3 {
                return Err(parse_err(path, "face with fewer than 3 vertices"));
            }
            let ids: Vec<u32> = idx.iter().map(|&v| v as u32).collect();
            for k in 1..ids.len() - 1 {
                mesh.triangles.push([ids[0], ids[k], ids[k + 1]]);
            }
        }
    }
    Ok(mesh)
}

/// Binary little-endian PLY: double positions/normals, float colors/UVs, so
/// every attribute round-trips bit-exact.
fn save_ply(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "ply")?;
    writeln!(w, "format binary_little_endian 1.0")?;
    writeln!(w, "element vertex {}", mesh.vertices.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    if mesh.normals.is_some() {
        for n in ["nx", "ny", "nz"] {
            writeln!(w, "property double {n}")?;
        }
    }
    if mesh.colors.is_some() {
        for c in ["r", "g", "b"] {
            writeln!(w, "property float {c}")?;
        }
    }
    if mesh.uvs.is_some() {
        for c in ["s", "t"] {
            writeln!(w, "property float {c}")?;
        }
    }
    writeln!(w, "element face {}", mesh.triangles.len())?;
    writeln!(w, "property list uchar uint vertex_indices")?;
    writeln!(w, "end_header")?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        for k in 0..3 {
            w.write_all(&v[k].to_le_bytes())?;
        }
        if let Some(normals) = &mesh.normals {
            for k in 0..3 {
                w.write_all(&normals[i][k].to_le_bytes())?;
            }
        }
        if let Some(colors) = &mesh.colors {
            for k in 0..3 {
                w.write_all(&colors[i][k].to_le_bytes())?;
            }
        }
        if let Some(uvs) = &mesh.uvs {
            for k in 0..2 {
                w.write_all(&uvs[i][k].to_le_bytes())?;
            }
        }
    }
    for tri in &mesh.triangles {
        w.write_all(&[3u8])?;
        for &v in tri {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- glTF / GLB

fn load_gltf(path: &Path) -> Result<TriMesh> {
    let raw = std::fs::read(path)?;
    let (json, bin): (serde_json::Value, Vec<u8>) = if raw.starts_with(b"glTF") {
        parse_glb(path, &raw)?
    } else {
        let json: serde_json::Value = serde_json::from_slice(&raw)
            .map_err(|e| parse_err(path, format!("bad glTF JSON: {e}")))?;
        let bin = load_gltf_buffer(path, &json)?;
        (json, bin)
    };
    build_gltf_mesh(path, &json, &bin)
}

fn parse_glb(path: &Path, raw: &[u8]) -> Result<(serde_json::Value, Vec<u8>)> {
    if raw.len() < 12 {
        return Err(parse_err(path, "GLB shorter than header"));
    }
    let version = u32::from_le_bytes(raw[4..8].try_into().unwrap());
    if version != 2 {
        return Err(parse_err(path, format!("unsupported GLB version {version}")));
    }
    let mut pos = 12usize;
    let mut json = None;
    let mut bin = Vec::new();
    while pos + 8 <= raw.len() {
        let len = u32::from_le_bytes(raw[pos..pos + 4].try_into().unwrap()) as usize;
        let kind = &raw[pos + 4..pos + 8];
        let body = raw
            .get(pos + 8..pos + 8 + len)
            .ok_or_else(|| parse_err(path, "truncated GLB chunk"))?;
        match kind {
            b"JSON" => {
                json = Some(
                    serde_json::from_slice(body)
                        .map_err(|e| parse_err(path, format!("bad GLB JSON: {e}")))?,
                )
            }
            b"BIN\0" => bin = body.to_vec(),
            _ => {}
        }
        pos += 8 + len;
    }
    Ok((json.ok_or_else(|| parse_err(path, "GLB missing JSON chunk"))?, bin))
}

fn load_gltf_buffer(path: &Path, json: &serde_json::Value) -> Result<Vec<u8>> {
    let Some(uri) = json["buffers"][0]["uri"].as_str() else {
        return Ok(Vec::new());
    };
    if let Some(data) = uri.strip_prefix("data:") {
        let b64 = data
            .split_once("base64,")
            .map(|(_, d)| d)
            .ok_or_else(|| parse_err(path, "only base64 data URIs supported"))?;
        decode_base64(b64).ok_or_else(|| parse_err(path, "bad base64 buffer"))
    } else {
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        Ok(std::fs::read(dir.join(uri))?)
    }
}

fn decode_base64(s: &str) -> Option<Vec<u8>> {
    let val = |c: u8| -> Option<u32> {
        Some(match c {
            b'A'..=b'Z' => (c - b'A') as u32,
            b'a'..=b'z' => (c - b'a' + 26) as u32,
            b'0'..=b'9' => (c - b'0' + 52) as u32,
            b'+' => 62,
            b'/' => 63,
            _ => return None,
        })
    };
    let bytes: Vec<u8> = s.bytes().filter(|&c| c != b'=' && !c.is_ascii_whitespace()).collect();
    let mut out = Vec::with_capacity(bytes.len() * 3 / 4);
    for chunk in bytes.chunks(4) {
        let mut acc = 0u32;
        for &c in chunk {
            acc = (acc << 6) | val(c)?;
        }
        let bits = chunk.len() * 6;
        acc <<= 24 - bits;
        let n = bits / 8;
        for k in 0..n {
            out.push((acc >> (16 - 8 * k)) as u8);
        }
    }
    Some(out)
}

struct GltfAccessor<'a> {
    json: &'a serde_json::Value,
    bin: &'a [u8],
}

impl<'a> GltfAccessor<'a> {
    /// Read accessor `idx` as rows of f64 components (unnormalized integers
    /// are returned as-is; normalized ones scaled to [0,1]).
    fn read(&self, path: &Path, idx: usize) -> Result<Vec<Vec<f64>>> {
        let acc = &self.json["accessors"][idx];
        let count = acc["count"].as_u64().unwrap_or(0) as usize;
        let comp_type = acc["componentType"].as_u64().unwrap_or(0);
        let ty = acc["type"].as_str().unwrap_or("");
        let normalized = acc["normalized"].as_bool().unwrap_or(false);
        let ncomp = match ty {
            "SCALAR" => 1,
            "VEC2" => 2,
            "VEC3" => 3,
            "VEC4" => 4,
            other => return Err(parse_err(path, format!("accessor type {other:?}"))),
        };
        let (csize, read): (usize, fn(&[u8]) -> f64) = match comp_type {
            5120 => (1, |b| b[0] as i8 as f64),
            5121 => (1, |b| b[0] as f64),
            5122 => (2, |b| i16::from_le_bytes([b[0], b[1]]) as f64),
            5123 => (2, |b| u16::from_le_bytes([b[0], b[1]]) as f64),
            5125 => (4, |b| u32::from_le_bytes(b[..4].try_into().unwrap()) as f64),
            5126 => (4, |b| f32::from_le_bytes(b[..4].try_into().unwrap()) as f64),
            other => return Err(parse_err(path, format!("component type {other}"))),
        };
        let scale = if normalized {
            match comp_type {
                5121 => 1.0 / 255.0,
                5123 => 1.0 / 65535.0,
                _ => 1.0,
            }
        } else {
            1.0
        };
        let bv_idx = acc["bufferView"].as_u64().unwrap_or(0) as usize;
        let bv = &self.json["bufferViews"][bv_idx];
        let bv_off = bv["byteOffset"].as_u64().unwrap_or(0) as usize;
        let stride = bv["byteStride"]
            .as_u64()
            .map(|s| s as usize)
            .unwrap_or(csize * ncomp);
        let acc_off = acc["byteOffset"].as_u64().unwrap_or(0) as usize;
        let base = bv_off + acc_off;
        let mut rows = Vec::with_capacity(count);
        for i in 0..count {
            let start = base + i * stride;
            let mut row = Vec::with_capacity(ncomp);
            for c in 0..ncomp {
                let o = start + c * csize;
                let b = self
                    .bin
                    .get(o..o + csize)
                    .ok_or_else(|| parse_err(path, "accessor out of buffer bounds"))?;
                row.push(read(b) * scale);
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

fn build_gltf_mesh(path: &Path, json: &serde_json::Value, bin: &[u8]) -> Result<TriMesh> {
    let acc = GltfAccessor { json, bin };
    let mut out = TriMesh::default();
    let mut any_color = false;
    let mut any_uv = false;

    // Node traversal in scene order; default to all root-less nodes if no
    // scene is declared.
    let scene = json["scene"].as_u64().unwrap_or(0) as usize;
    let roots: Vec<usize> = json["scenes"][scene]["nodes"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_u64()).map(|v| v as usize).collect())
        .unwrap_or_else(|| (0..json["nodes"].as_array().map_or(0, |a| a.len())).collect());

    let mut stack: Vec<(usize, nalgebra::Matrix4<f64>)> = roots
        .into_iter()
        .rev()
        .map(|n| (n, nalgebra::Matrix4::identity()))
        .collect();
    while let Some((node_idx, parent)) = stack.pop() {
        let node = &json["nodes"][node_idx];
        let local = node_transform(node);
        let world = parent * local;
        if let Some(mesh_idx) = node["mesh"].as_u64() {
            append_gltf_mesh(path, &acc, mesh_idx as usize, &world, &mut out, &mut any_color, &mut any_uv)?;
        }
        if let Some(children) = node["children"].as_array() {
            for c in children.iter().rev() {
                if let Some(ci) = c.as_u64() {
                    stack.push((ci as usize, world));
                }
            }
        }
    }
    // Files with meshes but no nodes at all.
    if out.vertices.is_empty() && json["nodes"].as_array().map_or(true, |a| a.is_empty()) {
        if let Some(meshes) = json["meshes"].as_array() {
            for m in 0..meshes.len() {
                append_gltf_mesh(path, &acc, m, &nalgebra::Matrix4::identity(), &mut out, &mut any_color, &mut any_uv)?;
            }
        }
    }
    if !any_color {
        out.colors = None;
    }
    if !any_uv {
        out.uvs = None;
    }
    Ok(out)
}

fn node_transform(node: &serde_json::Value) -> nalgebra::Matrix4<f64> {
    if let Some(m) = node["matrix"].as_array() {
        let vals: Vec<f64> = m.iter().filter_map(|v| v.as_f64()).collect();
        if vals.len() == 16 {
            // glTF matrices are column-major.
            return nalgebra::Matrix4::from_column_slice(&vals);
        }
    }
    let get3 = |key: &str, default: [f64; 3]| -> [f64; 3] {
        node[key]
            .as_array()
            .and_then(|a| {
                let v: Vec<f64> = a.iter().filter_map(|x| x.as_f64()).collect();
                v.try_into().ok()
            })
            .unwrap_or(default)
    };
    let t = get3("translation", [0.0; 3]);
    let s = get3("scale", [1.0; 3]);
    let q: [f64; 4] = node["rotation"]
        .as_array()
        .and_then(|a| {
            let v: Vec<f64> = a.iter().filter_map(|x| x.as_f64()).collect();
            v.try_into().ok()
        })
        .unwrap_or([0.0, 0.0, 0.0, 1.0]);
    let rot = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        q[3], q[0], q[1], q[2],
    ));
    let mut m = nalgebra::Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(rot.to_rotation_matrix().into_inner() * nalgebra::Matrix3::from_diagonal(&Vec3::new(s[0], s[1], s[2]))));
    m[(0, 3)] = t[0];
    m[(1, 3)] = t[1];
    m[(2, 3)] = t[2];
    m
}

fn append_gltf_mesh(
    path: &Path,
    acc: &GltfAccessor,
    mesh_idx: usize,
    world: &nalgebra::Matrix4<f64>,
    out: &mut TriMesh,
    any_color: &mut bool,
    any_uv: &mut bool,
) -> Result<()> {
    let prims = acc.json["meshes"][mesh_idx]["primitives"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    for prim in &prims {
        let mode = prim["mode"].as_u64().unwrap_or(4);
        if mode != 4 {
            return Err(parse_err(path, format!("unsupported primitive mode {mode}")));
        }
        let pos_idx = prim["attributes"]["POSITION"]
            .as_u64()
            .ok_or_else(|| parse_err(path, "primitive lacks POSITION"))? as usize;
        let positions = acc.read(path, pos_idx)?;
        let base = out.vertices.len() as u32;
        for p in &positions {
            let h = world * nalgebra::Vector4::new(p[0], p[1], p[2], 1.0);
            out.vertices.push(Pt3::new(h.x, h.y, h.z));
        }
        let n = positions.len();
        // Keep attribute arrays aligned across primitives.
        let colors = prim["attributes"]["COLOR_0"]
            .as_u64()
            .map(|i| acc.read(path, i as usize))
            .transpose()?;
        let uvs = prim["attributes"]["TEXCOORD_0"]
            .as_u64()
            .map(|i| acc.read(path, i as usize))
            .transpose()?;
        if colors.is_some() {
            *any_color = true;
        }
        if uvs.is_some() {
            *any_uv = true;
        }
        let col_dst = out.colors.get_or_insert_with(Vec::new);
        while col_dst.len() < base as usize {
            col_dst.push([0.0; 3]);
        }
        for i in 0..n {
            col_dst.push(match &colors {
                Some(c) => [c[i][0] as f32, c[i][1] as f32, c[i][2] as f32],
                None => [0.0; 3],
            });
        }
        let uv_dst = out.uvs.get_or_insert_with(Vec::new);
        while uv_dst.len() < base as usize {
            uv_dst.push([0.0; 2]);
        }
        for i in 0..n {
            uv_dst.push(match &uvs {
                Some(u) => [u[i][0] as f32, u[i][1] as f32],
                None => [0.0; 2],
            });
        }
        match prim["indices"].as_u64() {
            Some(ii) => {
                let idx = acc.read(path, ii as usize)?;
                for tri in idx.chunks(3) {
                    if tri.len() == 3 {
                        out.triangles.push([
                            base + tri[0][0] as u32,
                            base + tri[1][0] as u32,
                            base + tri[2][0] as u32,
                        ]);
                    }
                }
            }
            None => {
                for t in 0..n / 3 {
                    out.triangles.push([
                        base + 3 * t as u32,
                        base + 3 * t as u32 + 1,
                        base + 3 * t as u32 + 2,
                    ]);
                }
            }
        }
    }
    Ok(())
}
