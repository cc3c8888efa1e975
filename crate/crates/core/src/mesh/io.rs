//! OFF and OBJ mesh file I/O.
//!
//! OFF: a header line `OFF`, a counts line `V F E`, then V vertex lines
//! `x y z` and F face lines `3 i j k` with 0-based indices. OBJ: `v x y z`
//! and `f i j k` with 1-based indices; other directives are ignored. Both
//! formats are ASCII and whitespace-delimited; writes carry 17 significant
//! digits so coordinates round-trip exactly. Files are written atomically
//! (temporary file in the same directory, then rename).

use super::{build_mesh, MeshError, TriangleMesh};
use crate::vec3::Vec3;
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Picks a format from a file extension (`.off` / `.obj`, case-insensitive).
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(MeshFormat::Off),
            "obj" => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

/// One whitespace-separated token with its 1-based column, for error reports.
struct Tokens<'a> {
    line: &'a str,
    line_no: usize,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: &'a str, line_no: usize) -> Self {
        Tokens { line, line_no, pos: 0 }
    }

    fn next(&mut self) -> Option<(&'a str, usize)> {
        let rest = &self.line[self.pos..];
        let offset = rest.find(|c: char| !c.is_whitespace())?;
        let start = self.pos + offset;
        let end = self.line[start..]
            .find(char::is_whitespace)
            .map_or(self.line.len(), |e| start + e);
        self.pos = end;
        Some((&self.line[start..end], start + 1))
    }

    fn expect_f64(&mut self, what: &str) -> Result<f64, MeshError> {
        let (tok, col) = self.next().ok_or_else(|| parse_err(self.line_no, self.line.len() + 1, format!("expected {what}")))?;
        tok.parse::<f64>().map_err(|_| parse_err(self.line_no, col, format!("expected {what}, got {tok:?}")))
    }

    fn expect_usize(&mut self, what: &str) -> Result<(usize, usize), MeshError> {
        let (tok, col) = self.next().ok_or_else(|| parse_err(self.line_no, self.line.len() + 1, format!("expected {what}")))?;
        let v = tok.parse::<usize>().map_err(|_| parse_err(self.line_no, col, format!("expected {what}, got {tok:?}")))?;
        Ok((v, col))
    }

    fn expect_end(&mut self) -> Result<(), MeshError> {
        if let Some((tok, col)) = self.next() {
            return Err(parse_err(self.line_no, col, format!("unexpected trailing token {tok:?}")));
        }
        Ok(())
    }
}

fn parse_err(line: usize, column: usize, message: String) -> MeshError {
    MeshError::Parse { line, column, message }
}

/// Loads and validates a mesh; validation failures are wrapped in
/// [`MeshError::ValidationFailed`].
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh, MeshError> {
    let text = fs::read_to_string(path)?;
    let (vertices, faces) = match format {
        MeshFormat::Off => parse_off(&text)?,
        MeshFormat::Obj => parse_obj(&text)?,
    };
    build_mesh(vertices, faces).map_err(|e| match e {
        e @ MeshError::Parse { .. } | e @ MeshError::Io(_) => e,
        other => MeshError::ValidationFailed(Box::new(other)),
    })
}

/// Writes a mesh atomically in the requested format.
pub fn save_mesh(mesh: &TriangleMesh, path: &Path, format: MeshFormat) -> Result<(), MeshError> {
    let mut body = String::new();
    match format {
        MeshFormat::Off => {
            body.push_str("OFF\n");
            body.push_str(&format!(
                "{} {} {}\n",
                mesh.vertex_count(),
                mesh.face_count(),
                mesh.edge_count()
            ));
            for v in mesh.vertices() {
                body.push_str(&format!("{:.16e} {:.16e} {:.16e}\n", v.x, v.y, v.z));
            }
            for f in mesh.faces() {
                body.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
            }
        }
        MeshFormat::Obj => {
            for v in mesh.vertices() {
                body.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", v.x, v.y, v.z));
            }
            for f in mesh.faces() {
                body.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
            }
        }
    }
    write_atomic(path, body.as_bytes())?;
    Ok(())
}

/// Writes a text file atomically; shared by the CSV and JSON emitters.
pub fn write_text_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    write_atomic(path, text.as_bytes())
}

/// Writes via a temporary file in the target directory followed by a rename.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default(),
        std::process::id()
    ));
    if tmp == path {
        tmp.set_extension("tmp2");
    }
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<[u32; 3]>), MeshError> {
    let mut lines = significant_lines(text);
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file, expected OFF header".into()))?;
    if header.trim() != "OFF" {
        return Err(parse_err(header_no, 1, format!("expected OFF header, got {:?}", header.trim())));
    }

    let (counts_no, counts_line) = lines
        .next()
        .ok_or_else(|| parse_err(header_no, 1, "missing counts line after OFF header".into()))?;
    let mut toks = Tokens::new(counts_line, counts_no);
    let (nv, _) = toks.expect_usize("vertex count")?;
    let (nf, _) = toks.expect_usize("face count")?;
    let (_ne, _) = toks.expect_usize("edge count")?;
    toks.expect_end()?;

    let mut last_no = counts_no;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_no, 1, format!("expected {nv} vertex lines, file ended early")))?;
        last_no = no;
        let mut toks = Tokens::new(line, no);
        let x = toks.expect_f64("x coordinate")?;
        let y = toks.expect_f64("y coordinate")?;
        let z = toks.expect_f64("z coordinate")?;
        toks.expect_end()?;
        vertices.push(Vec3::new(x, y, z));
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (no, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_no, 1, format!("expected {nf} face lines, file ended early")))?;
        last_no = no;
        let mut toks = Tokens::new(line, no);
        let (arity, col) = toks.expect_usize("face vertex count")?;
        if arity != 3 {
            return Err(parse_err(no, col, format!("only triangles are supported, face has {arity} vertices")));
        }
        let mut tri = [0u32; 3];
        for slot in &mut tri {
            let (idx, col) = toks.expect_usize("vertex index")?;
            *slot = u32::try_from(idx)
                .map_err(|_| parse_err(no, col, format!("vertex index {idx} out of range")))?;
        }
        toks.expect_end()?;
        faces.push(tri);
    }

    if let Some((no, _)) = lines.next() {
        return Err(parse_err(no, 1, "unexpected content after the declared faces".into()));
    }
    Ok((vertices, faces))
}

fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[u32; 3]>), MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (no, line) in significant_lines(text) {
        let mut toks = Tokens::new(line, no);
        let Some((directive, _)) = toks.next() else { continue };
        match directive {
            "v" => {
                let x = toks.expect_f64("x coordinate")?;
                let y = toks.expect_f64("y coordinate")?;
                let z = toks.expect_f64("z coordinate")?;
                // an optional w component is permitted and ignored
                if toks.next().is_some() {
                    toks.expect_end()?;
                }
                vertices.push(Vec3::new(x, y, z));
            }
            "f" => {
                let mut tri = [0u32; 3];
                for slot in &mut tri {
                    let (tok, col) = toks
                        .next()
                        .ok_or_else(|| parse_err(no, line.len() + 1, "face needs three vertex indices".into()))?;
                    // accept i, i/t, i/t/n, i//n; the leading index is what we keep
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head
                        .parse()
                        .map_err(|_| parse_err(no, col, format!("expected vertex index, got {tok:?}")))?;
                    if idx < 1 {
                        return Err(parse_err(no, col, format!("OBJ indices are 1-based and positive, got {idx}")));
                    }
                    *slot = (idx - 1) as u32;
                }
                if let Some((tok, col)) = toks.next() {
                    return Err(parse_err(no, col, format!("only triangles are supported, extra corner {tok:?}")));
                }
                faces.push(tri);
            }
            _ => {} // vn, vt, s, o, g, usemtl, mtllib, ...
        }
    }
    Ok((vertices, faces))
}
