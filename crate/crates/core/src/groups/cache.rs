//! On-disk sphere cache.
//!
//! One file per (model fingerprint, radius), named `<fingerprint>-<k>.sphere`:
//!
//! ```text
//! fcstar-sphere 1
//! model free(2)
//! fingerprint 3f2a...
//! radius 2
//! count 12
//! (-2,-2)
//! ...
//! ```
//!
//! The element lines are the sphere's normal forms in their canonical order.
//! Files are written to a temporary name and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::model::{Element, GroupModel, SphereIndex};
use crate::error::{Error, Result};

pub const SPHERE_FORMAT_VERSION: u32 = 1;

pub fn sphere_path(dir: &Path, model: &GroupModel, radius: usize) -> PathBuf {
    dir.join(format!("{}-{radius}.sphere", model.fingerprint()))
}

pub fn encode_sphere(model: &GroupModel, sphere: &SphereIndex) -> String {
    let mut out = String::new();
    out.push_str(&format!("fcstar-sphere {SPHERE_FORMAT_VERSION}\n"));
    out.push_str(&format!("model {}\n", model.kind()));
    out.push_str(&format!("fingerprint {}\n", model.fingerprint()));
    out.push_str(&format!("radius {}\n", sphere.radius));
    out.push_str(&format!("count {}\n", sphere.len()));
    for x in &sphere.elements {
        out.push_str(&x.to_string());
        out.push('\n');
    }
    out
}

/// Parses a sphere file. Returns `None` when the header belongs to a
/// different model, radius or format version.
pub fn decode_sphere(text: &str, model: &GroupModel, radius: usize) -> Result<Option<Vec<Element>>> {
    let mut lines = text.lines();
    let mut header = |key: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated sphere header".into()))?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("expected '{key}' line, found '{line}'")))
    };
    if header("fcstar-sphere")? != SPHERE_FORMAT_VERSION.to_string() {
        return Ok(None);
    }
    let kind = header("model")?;
    let fp = header("fingerprint")?;
    let r: usize = header("radius")?
        .parse()
        .map_err(|_| Error::Parse("bad radius".into()))?;
    let count: usize = header("count")?
        .parse()
        .map_err(|_| Error::Parse("bad count".into()))?;
    if kind != model.kind().to_string() || fp != model.fingerprint() || r != radius {
        return Ok(None);
    }
    let elements = lines
        .filter(|l| !l.trim().is_empty())
        .map(str::parse::<Element>)
        .collect::<Result<Vec<_>>>()?;
    if elements.len() != count {
        return Err(Error::Parse(format!(
            "sphere file lists {} elements, header says {count}",
            elements.len()
        )));
    }
    Ok(Some(elements))
}

pub fn read_sphere(dir: &Path, model: &GroupModel, radius: usize) -> Result<Option<Vec<Element>>> {
    let path = sphere_path(dir, model, radius);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    decode_sphere(&text, model, radius)
}

pub fn write_sphere(dir: &Path, model: &GroupModel, sphere: &SphereIndex) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = sphere_path(dir, model, sphere.radius);
    write_atomic(&path, encode_sphere(model, sphere).as_bytes())?;
    Ok(path)
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
        f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_model, ModelKind};

    #[test]
    fn roundtrip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_model(ModelKind::Free(2))
            .unwrap()
            .with_cache_dir(dir.path());
        let s2 = g.sphere(2).unwrap();
        let path = sphere_path(dir.path(), &g, 2);
        assert!(path.exists());
        let loaded = read_sphere(dir.path(), &g, 2).unwrap().unwrap();
        assert_eq!(loaded, s2.elements);

        // A fresh model reuses the files and sees the same ordering.
        let h = make_model(ModelKind::Free(2))
            .unwrap()
            .with_cache_dir(dir.path());
        assert_eq!(h.sphere(2).unwrap().elements, s2.elements);
    }

    #[test]
    fn foreign_header_is_ignored() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let h = make_model(ModelKind::Zd(2)).unwrap();
        let text = encode_sphere(&g, &g.sphere(1).unwrap());
        assert!(decode_sphere(&text, &h, 1).unwrap().is_none());
        assert!(decode_sphere(&text, &g, 2).unwrap().is_none());
        assert_eq!(decode_sphere(&text, &g, 1).unwrap().unwrap().len(), 4);
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let g = make_model(ModelKind::Free(2)).unwrap();
        let text = encode_sphere(&g, &g.sphere(1).unwrap()).replace("count 4", "count 5");
        assert!(decode_sphere(&text, &g, 1).is_err());
    }
}
