//! Binary snapshot format, little-endian:
//!
//! ```text
//! "MHDSNAP1"  u32 version  u32 n  f64 L  f64 t  f64 eta  u32 field_count
//! per field:  u16 name_len  name (UTF-8)  n³ × f64 (x fastest)
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::SolverState;
use crate::spectral::{Grid, ScalarField, VectorField};

pub const MAGIC: &[u8; 8] = b"MHDSNAP1";
pub const VERSION: u32 = 1;
const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub length: f64,
    pub t: f64,
    pub eta: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    pub fn new(grid: Grid, t: f64, eta: f64) -> Self {
        Snapshot {
            n: grid.n(),
            length: grid.length(),
            t,
            eta,
            fields: Vec::new(),
        }
    }

    /// `u` and `b` of a solver state.
    pub fn from_state(state: &SolverState) -> Self {
        let mut s = Snapshot::new(state.grid(), state.t(), state.params().eta);
        s.add_vector("u", state.u());
        s.add_vector("b", state.b());
        s
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }

    pub fn add_scalar(&mut self, name: &str, f: &ScalarField) {
        self.fields.push((name.to_string(), f.physical_values().into_owned()));
    }

    /// Stored as `name.x`, `name.y`, `name.z`.
    pub fn add_vector(&mut self, name: &str, f: &VectorField) {
        let values = f.physical_values();
        for (axis, v) in AXES.iter().zip(values) {
            self.fields.push((format!("{name}.{axis}"), v.into_owned()));
        }
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.fields.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Vector names, i.e. prefixes with all three components present.
    pub fn vector_names(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .fields
            .iter()
            .filter_map(|(n, _)| n.strip_suffix(".x"))
            .filter(|base| {
                AXES.iter()
                    .all(|a| self.fields.iter().any(|(n, _)| *n == format!("{base}.{a}")))
            })
            .map(str::to_string)
            .collect();
        out.dedup();
        out
    }

    pub fn raw(&self, name: &str) -> Option<&[f64]> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn scalar(&self, name: &str) -> Result<ScalarField> {
        let v = self.raw(name).ok_or_else(|| self.missing(name))?;
        ScalarField::from_physical(self.grid()?, v.to_vec())
    }

    pub fn vector(&self, name: &str) -> Result<VectorField> {
        let comp = |axis: &str| self.scalar(&format!("{name}.{axis}"));
        if self.raw(&format!("{name}.x")).is_none() {
            return Err(self.missing(name));
        }
        VectorField::new(comp("x")?, comp("y")?, comp("z")?)
    }

    fn missing(&self, name: &str) -> Error {
        Error::Config(format!(
            "snapshot has no field `{name}` (fields: {})",
            self.field_names().join(", ")
        ))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let n3 = self.n.pow(3);
        let mut out = Vec::with_capacity(44 + self.fields.len() * (n3 * 8 + 16));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.length.to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.eta.to_le_bytes());
        out.extend_from_slice(&(self.fields.len() as u32).to_le_bytes());
        for (name, values) in &self.fields {
            debug_assert_eq!(values.len(), n3);
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::NotSnapshot("bad magic bytes".into()));
        }
        let mut r = Reader {
            bytes,
            pos: MAGIC.len(),
        };
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::NotSnapshot(format!(
                "unsupported version {version}, expected {VERSION}"
            )));
        }
        let n = r.u32()? as usize;
        let length = r.f64()?;
        let t = r.f64()?;
        let eta = r.f64()?;
        let count = r.u32()? as usize;
        let n3 = n
            .checked_pow(3)
            .ok_or_else(|| Error::CorruptSnapshot(format!("grid size {n} overflows")))?;
        let mut fields = Vec::with_capacity(count.min(64));
        for _ in 0..count {
            let len = r.u16()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::CorruptSnapshot("field name is not UTF-8".into()))?
                .to_string();
            let raw = r.take(n3 * 8)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            fields.push((name, values));
        }
        if r.pos != bytes.len() {
            return Err(Error::CorruptSnapshot(format!(
                "{} trailing bytes after the last field",
                bytes.len() - r.pos
            )));
        }
        Ok(Snapshot {
            n,
            length,
            t,
            eta,
            fields,
        })
    }

    /// Atomic: writes a sibling temporary file and renames it.
    pub fn write(&self, path: &Path) -> Result<()> {
        super::write_atomic(path, &self.to_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Reads and checks the grid size against `n`.
    pub fn read_expecting(path: &Path, n: usize) -> Result<Self> {
        let s = Self::read(path)?;
        if s.n != n {
            return Err(Error::CorruptSnapshot(format!(
                "grid size {} does not match the expected {n}",
                s.n
            )));
        }
        Ok(s)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::CorruptSnapshot(format!(
                "truncated: needed {len} bytes at offset {}, file has {}",
                self.pos,
                self.bytes.len()
            ))),
        }
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
