//! Binary field and sinogram files.
//!
//! Both formats are little-endian throughout and carry a four-byte magic
//! so a truncated or foreign file fails fast.
//!
//! Field files (`PMT1`): magic, `u32` transverse dimension count `n`,
//! `u32` sample count per axis (`y` last), `f64` spacing per axis, `f64`
//! origin per axis, one `u8` half-space flag, then the row-major `f64`
//! samples.
//!
//! Sinogram files (`PMS1`): magic, `u32` `n`, `u32` direction count,
//! `u32` offset count, `f64` first offset, `f64` offset spacing, then per
//! direction its `n + 1` unit-vector components followed by its offset
//! samples.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::radon::Sinogram;

const FIELD_MAGIC: &[u8; 4] = b"PMT1";
const SINOGRAM_MAGIC: &[u8; 4] = b"PMS1";

fn write_u32<W: Write>(w: &mut W, v: u32) -> PmtResult<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> PmtResult<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> PmtResult<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> PmtResult<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Writes a field in the `PMT1` format.
///
/// # Arguments
///
/// * `field` - Field to serialize
/// * `path` - Destination file, replaced if present
pub fn write_field(field: &Field, path: &Path) -> PmtResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    let g = field.grid();
    write_u32(&mut w, g.n() as u32)?;
    for &d in g.dims() {
        write_u32(&mut w, d as u32)?;
    }
    for &s in g.spacing() {
        write_f64(&mut w, s)?;
    }
    for &o in g.origin() {
        write_f64(&mut w, o)?;
    }
    w.write_all(&[u8::from(field.half_space())])?;
    for &v in field.values() {
        write_f64(&mut w, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field written by [`write_field`].
///
/// # Arguments
///
/// * `path` - Source file
///
/// # Returns
///
/// * The field, with its half-space flag restored; compact support is a
///   runtime declaration and is not persisted
pub fn read_field(path: &Path) -> PmtResult<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(PmtError::BadFormat(format!(
            "expected field magic {:?}, found {:?}",
            FIELD_MAGIC, magic
        )));
    }
    let n = read_u32(&mut r)? as usize;
    if n == 0 || n > 2 {
        return Err(PmtError::BadFormat(format!(
            "unsupported transverse dimension {} in field file",
            n
        )));
    }
    let axes = n + 1;
    let mut dims = Vec::with_capacity(axes);
    for _ in 0..axes {
        dims.push(read_u32(&mut r)? as usize);
    }
    let mut spacing = Vec::with_capacity(axes);
    for _ in 0..axes {
        spacing.push(read_f64(&mut r)?);
    }
    let mut origin = Vec::with_capacity(axes);
    for _ in 0..axes {
        origin.push(read_f64(&mut r)?);
    }
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    if flag[0] > 1 {
        return Err(PmtError::BadFormat(format!(
            "half-space flag must be 0 or 1, found {}",
            flag[0]
        )));
    }
    let grid = GridSpec::new(n, dims, spacing, origin)
        .map_err(|e| PmtError::BadFormat(format!("field file carries an invalid grid: {}", e)))?;
    let mut values = vec![0.0; grid.len()];
    for v in &mut values {
        *v = read_f64(&mut r)?;
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(PmtError::BadFormat(
            "field file has trailing bytes".to_string(),
        ));
    }
    let field = Field::from_values(grid, values)
        .expect("sample count was sized from the grid just parsed");
    if flag[0] == 1 {
        field.with_half_space(true).map_err(|_| {
            PmtError::BadFormat(
                "field file declares half-space but has nonzero samples at y <= 0".to_string(),
            )
        })
    } else {
        Ok(field)
    }
}

/// Writes a sinogram in the `PMS1` format.
///
/// # Arguments
///
/// * `sinogram` - Sinogram to serialize
/// * `path` - Destination file, replaced if present
pub fn write_sinogram(sinogram: &Sinogram, path: &Path) -> PmtResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SINOGRAM_MAGIC)?;
    write_u32(&mut w, sinogram.n() as u32)?;
    write_u32(&mut w, sinogram.num_directions() as u32)?;
    write_u32(&mut w, sinogram.num_offsets() as u32)?;
    write_f64(&mut w, sinogram.p_min())?;
    write_f64(&mut w, sinogram.dp())?;
    for d in 0..sinogram.num_directions() {
        for &c in sinogram.direction(d) {
            write_f64(&mut w, c)?;
        }
        for &v in sinogram.row(d) {
            write_f64(&mut w, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a sinogram written by [`write_sinogram`].
pub fn read_sinogram(path: &Path) -> PmtResult<Sinogram> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SINOGRAM_MAGIC {
        return Err(PmtError::BadFormat(format!(
            "expected sinogram magic {:?}, found {:?}",
            SINOGRAM_MAGIC, magic
        )));
    }
    let n = read_u32(&mut r)? as usize;
    if n == 0 || n > 2 {
        return Err(PmtError::BadFormat(format!(
            "unsupported transverse dimension {} in sinogram file",
            n
        )));
    }
    let ndir = read_u32(&mut r)? as usize;
    let np = read_u32(&mut r)? as usize;
    let p_min = read_f64(&mut r)?;
    let dp = read_f64(&mut r)?;
    let mut directions = Vec::with_capacity(ndir * (n + 1));
    let mut values = Vec::with_capacity(ndir * np);
    for _ in 0..ndir {
        for _ in 0..n + 1 {
            directions.push(read_f64(&mut r)?);
        }
        for _ in 0..np {
            values.push(read_f64(&mut r)?);
        }
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(PmtError::BadFormat(
            "sinogram file has trailing bytes".to_string(),
        ));
    }
    Sinogram::new(n, directions, p_min, dp, np, values)
        .map_err(|e| PmtError::BadFormat(format!("sinogram file is inconsistent: {}", e)))
}
