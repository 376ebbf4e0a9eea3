//! Binary field container: magic `MXFD`, u32 version, u32 dim, u32 ncomp,
//! u32 n per axis, f64 length per axis, then interleaved `(re, im)` f64
//! samples, component-major and row-major within a component. Little endian.

use std::fs;
use std::path::Path;

use maxwell_lap::{Field64, Grid64, C64};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"MXFD";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FieldFileError {
    #[error("not a field file (magic {0:?})")]
    BadMagic([u8; 4]),
    #[error("unsupported field file version {0}")]
    Version(u32),
    #[error("field file truncated: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("field file has {0} trailing bytes")]
    Trailing(usize),
    #[error("invalid header: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn encode(field: &Field64) -> Vec<u8> {
    let grid = field.grid();
    let d = grid.dim();
    let mut out = Vec::with_capacity(16 + 12 * d + 16 * field.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(field.ncomp() as u32).to_le_bytes());
    for n in grid.n() {
        out.extend_from_slice(&(*n as u32).to_le_bytes());
    }
    for l in grid.lengths() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for z in field.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], FieldFileError> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or(FieldFileError::Truncated { needed: end, have: self.bytes.len() })?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice has length N"))
    }

    fn u32(&mut self) -> Result<u32, FieldFileError> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64, FieldFileError> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Field64, FieldFileError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take::<4>()?;
    if &magic != MAGIC {
        return Err(FieldFileError::BadMagic(magic));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(FieldFileError::Version(version));
    }
    let dim = r.u32()? as usize;
    if !(dim == 2 || dim == 3) {
        return Err(FieldFileError::Header(format!("dimension {dim}")));
    }
    let ncomp = r.u32()? as usize;
    if ncomp == 0 {
        return Err(FieldFileError::Header("zero components".into()));
    }
    let n = (0..dim).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>, _>>()?;
    let lengths = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
    let grid = Grid64::new(&n, &lengths).map_err(|e| FieldFileError::Header(e.to_string()))?;
    let count = ncomp * grid.len();
    let needed = r.pos + 16 * count;
    if bytes.len() < needed {
        return Err(FieldFileError::Truncated { needed, have: bytes.len() });
    }
    if bytes.len() > needed {
        return Err(FieldFileError::Trailing(bytes.len() - needed));
    }
    let data = (0..count).map(|_| Ok(C64::new(r.f64()?, r.f64()?))).collect::<Result<Vec<_>, FieldFileError>>()?;
    Field64::from_data(&grid, ncomp, data).map_err(|e| FieldFileError::Header(e.to_string()))
}

pub fn write(path: &Path, field: &Field64) -> Result<(), FieldFileError> {
    Ok(fs::write(path, encode(field))?)
}

pub fn read(path: &Path) -> Result<Field64, FieldFileError> {
    decode(&fs::read(path)?)
}
