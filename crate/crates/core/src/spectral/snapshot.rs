//! Binary field snapshots: a 16-byte header (`GSQG`, version, nx, ny, flags,
//! 4 reserved bytes; little-endian `u16`s) followed by row-major
//! little-endian `f64` samples, with a JSON sidecar alongside.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

pub const MAGIC: &[u8; 4] = b"GSQG";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

/// Header flag: the run that wrote this snapshot stopped early.
pub const FLAG_INCOMPLETE: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub flags: u16,
    pub data: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub t: f64,
    pub config_hash: String,
    pub n: usize,
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_snapshot(path: &Path, snap: &Snapshot, meta: Option<&SnapshotMeta>) -> Result<()> {
    if snap.data.len() != snap.nx * snap.ny
        || snap.nx > u16::MAX as usize
        || snap.ny > u16::MAX as usize
    {
        return Err(Error::Argument(
            "snapshot shape does not match its data".into(),
        ));
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * snap.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(snap.nx as u16).to_le_bytes());
    buf.extend_from_slice(&(snap.ny as u16).to_le_bytes());
    buf.extend_from_slice(&snap.flags.to_le_bytes());
    buf.extend_from_slice(&[0u8; 4]);
    for x in &snap.data {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&buf)?;
    if let Some(m) = meta {
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(m)?)?;
    }
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = |m: &str| Error::Argument(format!("{}: {m}", path.display()));
    if buf.len() < HEADER_LEN || &buf[..4] != MAGIC {
        return Err(bad("not a GSQG snapshot"));
    }
    let u16_at = |i: usize| u16::from_le_bytes([buf[i], buf[i + 1]]);
    if u16_at(4) != VERSION {
        return Err(bad("unsupported snapshot version"));
    }
    let (nx, ny, flags) = (u16_at(6) as usize, u16_at(8) as usize, u16_at(10));
    let body = &buf[HEADER_LEN..];
    if body.len() != 8 * nx * ny {
        return Err(bad("truncated snapshot body"));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(Snapshot {
        nx,
        ny,
        flags,
        data,
    })
}

pub fn read_sidecar(path: &Path) -> Result<SnapshotMeta> {
    Ok(serde_json::from_str(&std::fs::read_to_string(
        sidecar_path(path),
    )?)?)
}
