//! Flat binary parameter files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  "NIMODEL\0"
//! version u32      1
//! kind    u32      1 = SGC, 2 = GCN
//! SGC:    u64 d, u64 classes, u64 hops,   u64 seed, then d×classes f64
//! GCN:    u64 d, u64 hidden,  u64 classes, u64 seed, then d×hidden f64, hidden×classes f64
//! ```
//!
//! Matrices are row-major little-endian `f64`.

use std::io::{Read, Write};

use ndarray::Array2;

use super::gcn::GcnModel;
use super::sgc::{SgcModel, SGC_HOPS};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"NIMODEL\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum StoredModel {
    Sgc(SgcModel),
    Gcn(GcnModel),
}

fn put_u64<W: Write>(w: &mut W, v: usize) -> Result<()> {
    w.write_all(&(v as u64).to_le_bytes())?;
    Ok(())
}

fn put_matrix<W: Write>(w: &mut W, m: &Array2<f64>) -> Result<()> {
    for x in m.as_standard_layout().iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_model<W: Write>(mut w: W, model: &StoredModel) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    match model {
        StoredModel::Sgc(m) => {
            w.write_all(&1u32.to_le_bytes())?;
            put_u64(&mut w, m.weights().nrows())?;
            put_u64(&mut w, m.weights().ncols())?;
            put_u64(&mut w, m.hops())?;
            w.write_all(&m.seed().to_le_bytes())?;
            put_matrix(&mut w, m.weights())?;
        }
        StoredModel::Gcn(m) => {
            w.write_all(&2u32.to_le_bytes())?;
            put_u64(&mut w, m.w1().nrows())?;
            put_u64(&mut w, m.hidden())?;
            put_u64(&mut w, m.w2().ncols())?;
            w.write_all(&m.seed().to_le_bytes())?;
            put_matrix(&mut w, m.w1())?;
            put_matrix(&mut w, m.w2())?;
        }
    }
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_matrix<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let len = rows
        .checked_mul(cols)
        .filter(|&l| l <= 1 << 31)
        .ok_or_else(|| Error::ModelFormat(format!("implausible matrix shape {rows}×{cols}")))?;
    let mut data = Vec::with_capacity(len);
    let mut b = [0u8; 8];
    for _ in 0..len {
        r.read_exact(&mut b)?;
        let x = f64::from_le_bytes(b);
        if !x.is_finite() {
            return Err(Error::ModelFormat("non-finite weight".into()));
        }
        data.push(x);
    }
    Ok(Array2::from_shape_vec((rows, cols), data).expect("length checked"))
}

pub fn read_model<R: Read>(mut r: R) -> Result<StoredModel> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let version = get_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let kind = get_u32(&mut r)?;
    let a = get_u64(&mut r)? as usize;
    let b = get_u64(&mut r)? as usize;
    let c = get_u64(&mut r)? as usize;
    let seed = get_u64(&mut r)?;
    match kind {
        1 => {
            if c != SGC_HOPS {
                return Err(Error::ModelFormat(format!("SGC hops must be {SGC_HOPS}, got {c}")));
            }
            Ok(StoredModel::Sgc(SgcModel::from_weights(get_matrix(&mut r, a, b)?, seed)))
        }
        2 => {
            let w1 = get_matrix(&mut r, a, b)?;
            let w2 = get_matrix(&mut r, b, c)?;
            Ok(StoredModel::Gcn(GcnModel::from_weights(w1, w2, seed)))
        }
        other => Err(Error::ModelFormat(format!("unknown model kind {other}"))),
    }
}
