//! Binary checkpoint format.
//!
//! Layout: the 8-byte magic `CHFLOWCK`, a version byte, a little-endian
//! `u32` descriptor length, the UTF-8 descriptor, then one block of
//! little-endian `f64` values per field in descriptor order. Spectral
//! blocks interleave real and imaginary parts in storage order
//! (`m` fastest, then `ky`, then `kx`); physical blocks hold the samples
//! in the same order.
//!
//! Descriptor lines:
//!
//! ```text
//! step <u64>
//! t <f64 bits as 16 hex digits>
//! accum <criterion bits> <pz_r bits> <last t bits | -> <last pz bits | ->
//! field <name> <even|odd> <spectral|physical> <nx> <ny> <nz>
//! ```
//!
//! Times and accumulators are stored as raw bits so a restart is exact.

use std::io;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{FieldData, Grid, Parity, ScalarField};
use crate::monitor::CriterionAccumulator;
use crate::solver::{Checkpoint, VelocityState};

pub const MAGIC: &[u8; 8] = b"CHFLOWCK";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("malformed checkpoint: {0}")]
    Format(String),
    #[error("{0}")]
    Field(#[from] crate::field::FieldError),
}

fn bad(msg: impl Into<String>) -> CheckpointError {
    CheckpointError::Format(msg.into())
}

fn bits(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

fn unbits(s: &str) -> Result<f64, CheckpointError> {
    u64::from_str_radix(s, 16).map(f64::from_bits).map_err(|_| bad(format!("bad float bits {s:?}")))
}

fn descriptor_line(name: &str, f: &ScalarField) -> String {
    let g = f.grid();
    let repr = if f.is_spectral() { "spectral" } else { "physical" };
    format!("field {name} {} {repr} {} {} {}\n", f.parity().as_str(), g.nx, g.ny, g.nz)
}

fn push_block(out: &mut Vec<u8>, f: &ScalarField) {
    match f.data() {
        FieldData::Spectral(c) => {
            for z in c {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        FieldData::Physical(v) => {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
}

const FIELD_NAMES: [&str; 3] = ["v1", "v2", "w"];
const RHS_NAMES: [&str; 3] = ["rhs1", "rhs2", "rhs3"];

pub fn encode(cp: &Checkpoint) -> Vec<u8> {
    let mut desc = format!("step {}\nt {}\n", cp.step, bits(cp.state.t));
    let (lt, lp) = match cp.accum.last {
        Some((t, p)) => (bits(t), bits(p)),
        None => ("-".to_string(), "-".to_string()),
    };
    desc.push_str(&format!("accum {} {} {lt} {lp}\n", bits(cp.accum.criterion), bits(cp.accum.pz_r)));
    let mut fields: Vec<(&str, &ScalarField)> = FIELD_NAMES.into_iter().zip(cp.state.components()).collect();
    if let Some(rhs) = &cp.prev_rhs {
        fields.extend(RHS_NAMES.into_iter().zip(rhs.iter()));
    }
    for (name, f) in &fields {
        desc.push_str(&descriptor_line(name, f));
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
    out.extend_from_slice(desc.as_bytes());
    for (_, f) in &fields {
        push_block(&mut out, f);
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| bad("truncated"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }
}

fn read_field(cur: &mut Cursor<'_>, line: &str) -> Result<(String, ScalarField), CheckpointError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let [_, name, parity, repr, nx, ny, nz] = parts[..] else {
        return Err(bad(format!("bad field record {line:?}")));
    };
    let parity = Parity::parse(parity).ok_or_else(|| bad(format!("bad parity {parity:?}")))?;
    let dim = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad dimension {s:?}")));
    let grid = Grid::new(dim(nx)?, dim(ny)?, dim(nz)?)?;
    let field = match repr {
        "spectral" => {
            let mut c = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                let re = cur.f64()?;
                c.push(Complex64::new(re, cur.f64()?));
            }
            ScalarField::from_spectral(grid, parity, c)?
        }
        "physical" => {
            let v = (0..grid.len()).map(|_| cur.f64()).collect::<Result<Vec<_>, _>>()?;
            ScalarField::from_physical(grid, parity, v)?
        }
        other => return Err(bad(format!("bad representation {other:?}"))),
    };
    Ok((name.to_string(), field))
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(8)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = cur.take(1)?[0];
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let len = u32::from_le_bytes(cur.take(4)?.try_into().expect("four bytes")) as usize;
    let desc = std::str::from_utf8(cur.take(len)?).map_err(|_| bad("descriptor is not UTF-8"))?;
    let mut step = None;
    let mut t = None;
    let mut accum = None;
    let mut fields = Vec::new();
    for line in desc.lines() {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("step") => {
                step = Some(words.next().and_then(|s| s.parse::<u64>().ok()).ok_or_else(|| bad("bad step"))?)
            }
            Some("t") => t = Some(unbits(words.next().ok_or_else(|| bad("bad t"))?)?),
            Some("accum") => {
                let w: Vec<&str> = words.collect();
                let [c, p, lt, lp] = w[..] else {
                    return Err(bad("bad accum record"));
                };
                let last = if lt == "-" { None } else { Some((unbits(lt)?, unbits(lp)?)) };
                accum = Some(CriterionAccumulator { last, criterion: unbits(c)?, pz_r: unbits(p)? });
            }
            Some("field") => fields.push(read_field(&mut cur, line)?),
            _ => return Err(bad(format!("unknown descriptor line {line:?}"))),
        }
    }
    if cur.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    let names: Vec<&str> = fields.iter().map(|(n, _)| n.as_str()).collect();
    let with_rhs = names == ["v1", "v2", "w", "rhs1", "rhs2", "rhs3"];
    if !(with_rhs || names == FIELD_NAMES) {
        return Err(bad(format!("unexpected field set {names:?}")));
    }
    let mut it = fields.into_iter().map(|(_, f)| f);
    let mut next = || it.next().expect("field count checked");
    let state = VelocityState::new(next(), next(), next(), t.ok_or_else(|| bad("missing t"))?)?;
    let prev_rhs = if with_rhs {
        let rhs = [next(), next(), next()];
        for (f, p) in rhs.iter().zip(crate::solver::RHS_PARITIES) {
            if f.parity() != p || !f.is_spectral() {
                return Err(bad("right-hand side fields must be spectral with velocity parities"));
            }
        }
        Some(rhs)
    } else {
        None
    };
    Ok(Checkpoint {
        step: step.ok_or_else(|| bad("missing step"))?,
        state,
        prev_rhs,
        accum: accum.ok_or_else(|| bad("missing accum"))?,
    })
}

pub fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), CheckpointError> {
    super::write_atomic(path, &encode(cp))?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    decode(&std::fs::read(path)?)
}
