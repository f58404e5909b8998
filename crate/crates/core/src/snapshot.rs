//! Binary state snapshots.
//!
//! A text header line `EL2D <N> <L> <components> <t>` is followed by
//! `components · N²` little-endian `f64` values, one component after another
//! in the physical row-major layout. A state snapshot stores `v1, v2, n1, n2, n3`.

use std::io::{BufRead, Write};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::fields::{Grid, ScalarField, VectorField};

const MAGIC: &str = "EL2D";
const COMPONENTS: usize = 5;

pub fn write_state(mut out: impl Write, grid: &Grid, state: &State) -> Result<()> {
    writeln!(out, "{MAGIC} {} {} {COMPONENTS} {}", grid.n(), grid.length(), state.t)?;
    let fields = state.v.0.iter().chain(state.n.0.iter());
    let mut buf = Vec::with_capacity(COMPONENTS * grid.size() * 8);
    for f in fields {
        for x in &f.0 {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Reads a snapshot written on `grid`; the state is returned unvalidated.
pub fn read_state(mut input: impl BufRead, grid: &Grid) -> Result<State> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 5 || parts[0] != MAGIC {
        return Err(Error::Snapshot(format!("bad header `{}`", header.trim())));
    }
    let bad = |what: &str| Error::Snapshot(format!("unreadable {what} in header"));
    let n: usize = parts[1].parse().map_err(|_| bad("N"))?;
    let length: f64 = parts[2].parse().map_err(|_| bad("L"))?;
    let comps: usize = parts[3].parse().map_err(|_| bad("component count"))?;
    let t: f64 = parts[4].parse().map_err(|_| bad("time"))?;
    if n != grid.n() || length != grid.length() {
        return Err(Error::Snapshot(format!(
            "snapshot grid N = {n}, L = {length} does not match N = {}, L = {}",
            grid.n(),
            grid.length()
        )));
    }
    if comps != COMPONENTS {
        return Err(Error::Snapshot(format!(
            "expected {COMPONENTS} components, found {comps}"
        )));
    }
    let size = grid.size();
    let mut bytes = vec![0u8; COMPONENTS * size * 8];
    input
        .read_exact(&mut bytes)
        .map_err(|e| Error::Snapshot(format!("truncated data: {e}")))?;
    let mut comp = bytes.chunks_exact(size * 8).map(|chunk| {
        ScalarField(
            chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect(),
        )
    });
    let v = VectorField(std::array::from_fn(|_| comp.next().expect("component")));
    let nf = VectorField(std::array::from_fn(|_| comp.next().expect("component")));
    Ok(State::relaxed(v, nf, t))
}
