//! Binary artifact container shared by neural checkpoints and baseline models.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic    8 bytes   b"CHATSAT\0"
//! version  u32       currently 1
//! kind     str       model-kind tag, e.g. "nnet" or "forest"
//! n_texts  u32
//!   name   str
//!   body   str
//! n_tensors u32
//!   name   str
//!   ndim   u32
//!   dims   u64 * ndim
//!   data   f64 * prod(dims)
//! ```
//!
//! `str` is a u32 byte length followed by UTF-8 bytes. Sections are written
//! in name order and nothing time-dependent is stored, so equal contents
//! give equal bytes.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CHATSAT\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Container {
    pub kind: String,
    pub texts: BTreeMap<String, String>,
    pub tensors: BTreeMap<String, Tensor>,
}

impl Container {
    pub fn new(kind: impl Into<String>) -> Container {
        Container {
            kind: kind.into(),
            ..Default::default()
        }
    }

    pub fn put_text(&mut self, name: &str, body: impl Into<String>) {
        self.texts.insert(name.to_string(), body.into());
    }

    pub fn put_tensor(&mut self, name: &str, dims: Vec<usize>, data: Vec<f64>) {
        self.tensors.insert(name.to_string(), Tensor { dims, data });
    }

    pub fn text(&self, name: &str) -> Result<&str> {
        self.texts
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| Error::Format(format!("container: missing text section {name:?}")))
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .get(name)
            .ok_or_else(|| Error::Format(format!("container: missing tensor {name:?}")))
    }

    pub fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Format(format!("expected a {kind:?} artifact, found {:?}", self.kind)));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        put_str(&mut out, &self.kind);
        out.extend_from_slice(&(self.texts.len() as u32).to_le_bytes());
        for (name, body) in &self.texts {
            put_str(&mut out, name);
            put_str(&mut out, body);
        }
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for (name, t) in &self.tensors {
            if t.dims.iter().product::<usize>() != t.data.len() {
                return Err(Error::Shape(format!("tensor {name}: dims {:?} vs {} values", t.dims, t.data.len())));
            }
            if t.data.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("tensor {name}")));
            }
            put_str(&mut out, name);
            out.extend_from_slice(&(t.dims.len() as u32).to_le_bytes());
            for &d in &t.dims {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for &x in &t.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Container> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("not a chatsat artifact (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported container version {version}")));
        }
        let mut c = Container::new(r.str()?);
        for _ in 0..r.u32()? {
            let name = r.str()?;
            let body = r.str()?;
            c.texts.insert(name, body);
        }
        for _ in 0..r.u32()? {
            let name = r.str()?;
            let ndim = r.u32()? as usize;
            let mut dims = Vec::with_capacity(ndim);
            for _ in 0..ndim {
                dims.push(r.u64()? as usize);
            }
            let n: usize = dims.iter().product();
            if n.checked_mul(8).map_or(true, |b| b > bytes.len()) {
                return Err(Error::Format(format!("tensor {name}: implausible dims {dims:?}")));
            }
            let mut data = Vec::with_capacity(n);
            for _ in 0..n {
                let x = f64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
                if !x.is_finite() {
                    return Err(Error::NonFinite(format!("tensor {name}")));
                }
                data.push(x);
            }
            c.tensors.insert(name, Tensor { dims, data });
        }
        if r.pos != bytes.len() {
            return Err(Error::Format("trailing bytes after last tensor".into()));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Container> {
        Container::from_bytes(&std::fs::read(path)?)
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("truncated artifact".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Format("invalid UTF-8 in artifact".into()))
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("line {}: expected key = value", i + 1)))?;
        if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Format(format!("line {}: duplicate key {:?}", i + 1, k.trim())));
        }
    }
    Ok(map)
}
