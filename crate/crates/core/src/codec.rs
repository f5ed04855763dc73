//! Binary instance container for replay.
//!
//! All integers and floats are little-endian.
//!
//! | field          | type                      |
//! |----------------|---------------------------|
//! | magic          | `b"WGAL"`                 |
//! | version        | `u8` (currently 1)        |
//! | flags          | `u8`: bit 0 = H present, bit 1 = uniform planting |
//! | n              | `u64`                     |
//! | rho            | `f64`                     |
//! | master_seed    | `u64`                     |
//! | trial_index    | `u64`                     |
//! | planted        | `n × u64`, 1-based images |
//! | A              | upper triangle, row-major `f64` |
//! | B              | upper triangle, row-major `f64` |
//! | H              | upper triangle, only if flagged |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Instance, PlantedMode, SeedSpec, WignerMatrix};
use crate::perm::Permutation;

pub const MAGIC: &[u8; 4] = b"WGAL";
pub const VERSION: u8 = 1;

const FLAG_NOISE: u8 = 1;
const FLAG_UNIFORM: u8 = 2;

pub fn write_instance<W: Write>(inst: &Instance, mut w: W) -> Result<()> {
    let mut flags = 0;
    if inst.noise.is_some() {
        flags |= FLAG_NOISE;
    }
    if inst.planted_mode == PlantedMode::Uniform {
        flags |= FLAG_UNIFORM;
    }
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, flags])?;
    w.write_all(&(inst.n() as u64).to_le_bytes())?;
    w.write_all(&inst.rho.to_le_bytes())?;
    w.write_all(&inst.seed.master_seed.to_le_bytes())?;
    w.write_all(&inst.seed.trial_index.to_le_bytes())?;
    for v in inst.planted.images() {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    let mut mats = vec![&inst.a, &inst.b];
    if let Some(h) = &inst.noise {
        mats.push(h);
    }
    for m in mats {
        for v in m.upper_triangle() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated file".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array(r)?))
}

fn read_matrix<R: Read>(r: &mut R, n: usize) -> Result<WignerMatrix> {
    let m = n * (n - 1) / 2;
    let mut vals = Vec::with_capacity(m);
    for _ in 0..m {
        vals.push(read_f64(r)?);
    }
    WignerMatrix::from_upper_triangle(n, &vals)
}

pub fn read_instance<R: Read>(mut r: R) -> Result<Instance> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic header".into()));
    }
    let [version, flags] = read_array(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = read_u64(&mut r)?;
    if !(2..=1 << 20).contains(&n) {
        return Err(Error::Format(format!("implausible size n = {n}")));
    }
    let n = n as usize;
    let rho = read_f64(&mut r)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Format(format!("rho = {rho} is outside [0, 1]")));
    }
    let seed = SeedSpec::new(read_u64(&mut r)?, read_u64(&mut r)?);
    let mut image = Vec::with_capacity(n);
    for _ in 0..n {
        image.push(read_u64(&mut r)? as usize);
    }
    let planted = Permutation::from_one_based(&image)
        .map_err(|e| Error::Format(format!("planted permutation: {e}")))?;
    let a = read_matrix(&mut r, n)?;
    let b = read_matrix(&mut r, n)?;
    let noise = if flags & FLAG_NOISE != 0 {
        Some(read_matrix(&mut r, n)?)
    } else {
        None
    };
    let planted_mode = if flags & FLAG_UNIFORM != 0 {
        PlantedMode::Uniform
    } else {
        PlantedMode::Identity
    };
    Ok(Instance {
        a,
        b,
        noise,
        planted,
        rho,
        seed,
        planted_mode,
    })
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<()> {
    write_instance(inst, BufWriter::new(File::create(path)?))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    read_instance(BufReader::new(File::open(path)?))
}
