//! PLY reader (ASCII and binary little-endian) and binary writer.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Location, Result};
use crate::geom::Point;
use crate::mesh::SceneMesh;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlyData {
    pub vertices: Vec<Point>,
    pub profile_ids: Option<Vec<u32>>,
    pub faces: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn decode_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_header(bytes: &[u8], origin: &Path) -> Result<Header> {
    let err = |offset: usize, msg: &str| Error::format(origin, Location::ByteOffset(offset as u64), msg);
    let mut offset = 0usize;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut first = true;
    loop {
        let Some(nl) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            return Err(err(bytes.len(), "truncated PLY header (no `end_header`)"));
        };
        let line_start = offset;
        let line = std::str::from_utf8(&bytes[offset..offset + nl])
            .map_err(|_| err(line_start, "non-UTF-8 header line"))?
            .trim_end_matches('\r')
            .trim();
        offset += nl + 1;
        if first {
            if line != "ply" {
                return Err(err(line_start, "missing `ply` magic"));
            }
            first = false;
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["format", fmt, _version] => {
                encoding = Some(match *fmt {
                    "ascii" => Encoding::Ascii,
                    "binary_little_endian" => Encoding::BinaryLe,
                    _ => return Err(err(line_start, &format!("unsupported PLY format `{fmt}`"))),
                });
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| err(line_start, "bad element count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", count, item, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| err(line_start, "property before element"))?;
                let (Some(count), Some(item)) = (Scalar::parse(count), Scalar::parse(item)) else {
                    return Err(err(line_start, "unknown list property type"));
                };
                el.properties.push(Property::List {
                    name: name.to_string(),
                    count,
                    item,
                });
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| err(line_start, "property before element"))?;
                let ty = Scalar::parse(ty)
                    .ok_or_else(|| err(line_start, &format!("unknown property type `{ty}`")))?;
                el.properties.push(Property::Scalar {
                    name: name.to_string(),
                    ty,
                });
            }
            _ => return Err(err(line_start, &format!("unrecognised header line `{line}`"))),
        }
    }
    let encoding = encoding.ok_or_else(|| err(offset, "PLY header has no `format` line"))?;
    Ok(Header {
        encoding,
        elements,
        body_offset: offset,
    })
}

/// Reads values one at a time from either body encoding.
struct BodyReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    encoding: Encoding,
    origin: &'a Path,
}

impl BodyReader<'_> {
    fn truncated(&self) -> Error {
        Error::format(
            self.origin,
            Location::ByteOffset(self.pos as u64),
            "unexpected end of PLY data",
        )
    }

    fn next(&mut self, ty: Scalar) -> Result<f64> {
        match self.encoding {
            Encoding::BinaryLe => {
                let n = ty.size();
                if self.pos + n > self.bytes.len() {
                    return Err(self.truncated());
                }
                let v = ty.decode_le(&self.bytes[self.pos..self.pos + n]);
                self.pos += n;
                Ok(v)
            }
            Encoding::Ascii => {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                    self.pos += 1;
                }
                let start = self.pos;
                while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.truncated());
                }
                let tok = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
                tok.parse::<f64>().map_err(|_| {
                    Error::format(
                        self.origin,
                        Location::ByteOffset(start as u64),
                        format!("cannot parse `{tok}` as a number"),
                    )
                })
            }
        }
    }
}

pub fn parse_ply(bytes: &[u8], origin: &Path) -> Result<PlyData> {
    let header = parse_header(bytes, origin)?;
    let mut reader = BodyReader {
        bytes,
        pos: header.body_offset,
        encoding: header.encoding,
        origin,
    };
    let mut data = PlyData::default();
    for el in &header.elements {
        let is_vertex = el.name == "vertex";
        let is_face = el.name == "face";
        let find = |n: &str| {
            el.properties
                .iter()
                .position(|p| matches!(p, Property::Scalar { name, .. } if name == n))
        };
        let (ix, iy, iz, ipid) = (find("x"), find("y"), find("z"), find("profile_id"));
        if is_vertex && (ix.is_none() || iy.is_none() || iz.is_none()) {
            return Err(Error::format(
                origin,
                Location::ByteOffset(header.body_offset as u64),
                "vertex element lacks x/y/z properties",
            ));
        }
        if is_vertex {
            data.vertices.reserve(el.count);
            if ipid.is_some() {
                data.profile_ids = Some(Vec::with_capacity(el.count));
            }
        }
        let mut row = vec![0.0; el.properties.len()];
        for _ in 0..el.count {
            let mut face = Vec::new();
            for (k, prop) in el.properties.iter().enumerate() {
                match prop {
                    Property::Scalar { ty, .. } => row[k] = reader.next(*ty)?,
                    Property::List { name, count, item } => {
                        let n = reader.next(*count)? as usize;
                        let keep = is_face && (name == "vertex_indices" || name == "vertex_index");
                        for _ in 0..n {
                            let v = reader.next(*item)?;
                            if keep {
                                face.push(v as u32);
                            }
                        }
                    }
                }
            }
            if is_vertex {
                data.vertices
                    .push(Point::new(row[ix.unwrap()], row[iy.unwrap()], row[iz.unwrap()]));
                if let (Some(i), Some(ids)) = (ipid, data.profile_ids.as_mut()) {
                    ids.push(row[i] as u32);
                }
            } else if is_face {
                if face.len() < 3 || face.iter().any(|&v| v as usize >= data.vertices.len()) {
                    return Err(Error::format(
                        origin,
                        Location::ByteOffset(reader.pos as u64),
                        "face with fewer than 3 vertices or an index out of range",
                    ));
                }
                data.faces.push(face);
            }
        }
    }
    Ok(data)
}

/// Binary little-endian PLY with float64 vertices and int32 triangle indices.
pub fn write_ply(mesh: &SceneMesh, out: &mut impl Write) -> std::io::Result<()> {
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty double x\nproperty double y\nproperty double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    let mut buf = Vec::with_capacity(mesh.vertices.len() * 24 + mesh.triangles.len() * 13);
    for v in &mesh.vertices {
        for c in [v.x, v.y, v.z] {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    for t in &mesh.triangles {
        buf.push(3u8);
        for &i in t {
            buf.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    out.write_all(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_with_extra_properties() {
        let src = b"ply\nformat ascii 1.0\ncomment test\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nproperty int profile_id\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 255 1\n1 0 0 0 1\n0 1 0.5 0 2\n3 0 1 2\n";
        let d = parse_ply(src, Path::new("a.ply")).unwrap();
        assert_eq!(d.vertices.len(), 3);
        assert_eq!(d.vertices[2], Point::new(0.0, 1.0, 0.5));
        assert_eq!(d.profile_ids, Some(vec![1, 1, 2]));
        assert_eq!(d.faces, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn binary_float32_vertices() {
        let mut src = b"ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n".to_vec();
        for v in [1.0f32, 2.0, 3.0, -1.0, 0.5, 0.25] {
            src.extend_from_slice(&v.to_le_bytes());
        }
        let d = parse_ply(&src, Path::new("b.ply")).unwrap();
        assert_eq!(d.vertices[1], Point::new(-1.0, 0.5, 0.25));
    }

    #[test]
    fn truncated_header_cites_offset() {
        let src = b"ply\nformat ascii 1.0\nelement vertex 3\nprop";
        let err = parse_ply(src, Path::new("t.ply")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("byte offset 42"), "{msg}");
        assert!(msg.contains("truncated"), "{msg}");
    }

    #[test]
    fn truncated_body() {
        let mut src = b"ply\nformat binary_little_endian 1.0\nelement vertex 2\nproperty double x\nproperty double y\nproperty double z\nend_header\n".to_vec();
        src.extend_from_slice(&[0u8; 30]);
        let err = parse_ply(&src, Path::new("t.ply")).unwrap_err();
        assert!(err.to_string().contains("unexpected end"));
    }

    #[test]
    fn big_endian_rejected() {
        let src = b"ply\nformat binary_big_endian 1.0\nend_header\n";
        assert!(parse_ply(src, Path::new("t.ply")).is_err());
    }
}
