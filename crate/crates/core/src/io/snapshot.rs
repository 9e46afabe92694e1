//! Binary snapshots: an 8-byte little-endian header length, a JSON header,
//! then the raw little-endian `f64` payload (nine frame components followed by
//! the two velocity components, each stored row by row with x fastest).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frame_field::{FrameComponents, FrameField};
use crate::sim::SimState;
use crate::spectral::{Grid2D, Vec2Field};

pub const SNAPSHOT_VERSION: u32 = 1;
const LAYOUT: &str = "frame[n1x,n1y,n1z,n2x,n2y,n2z,n3x,n3y,n3z] then velocity[vx,vy]; each component row-major, x fastest";
/// Refuse headers larger than this; a corrupt length prefix would otherwise
/// trigger a huge allocation.
const MAX_HEADER_BYTES: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotGrid {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub version: u32,
    pub grid: SnapshotGrid,
    /// Free-form model parameters, usually the resolved run configuration.
    #[serde(default)]
    pub params: Value,
    pub t: f64,
    pub step: u64,
    pub layout: String,
    pub endianness: String,
    pub elements: usize,
}

fn elements(grid: Grid2D) -> usize {
    11 * grid.points()
}

/// Writes `state` with an empty parameter record.
pub fn write_snapshot(state: &SimState, path: impl AsRef<Path>) -> Result<()> {
    write_snapshot_with_params(state, Value::Null, path)
}

pub fn write_snapshot_with_params(state: &SimState, params: Value, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let grid = state.grid();
    let header = SnapshotHeader {
        version: SNAPSHOT_VERSION,
        grid: SnapshotGrid {
            n: grid.n(),
            length: grid.length(),
        },
        params,
        t: state.t,
        step: state.step,
        layout: LAYOUT.into(),
        endianness: "little".into(),
        elements: elements(grid),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::CorruptHeader(e.to_string()))?;
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(&(json.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&json).map_err(io)?;
    let comps = state.frame.components().comps().iter().chain(state.velocity.comps());
    for c in comps {
        for x in c {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Reads a snapshot, returning the header alongside the state.
pub fn read_snapshot_with_header(path: impl AsRef<Path>) -> Result<(SnapshotHeader, SimState)> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let (len, rest) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| Error::CorruptHeader("file shorter than the length prefix".into()))?;
    let len = u64::from_le_bytes(*len);
    if len > MAX_HEADER_BYTES || len as usize > rest.len() {
        return Err(Error::CorruptHeader(format!("implausible header length {len}")));
    }
    let (head, payload) = rest.split_at(len as usize);
    let raw: Value = serde_json::from_slice(head).map_err(|e| Error::CorruptHeader(e.to_string()))?;
    // Check the version before the full schema so newer files get a clear error.
    let version = raw
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::CorruptHeader("missing version".into()))?;
    if version != SNAPSHOT_VERSION as u64 {
        return Err(Error::UnsupportedVersion {
            found: version as u32,
            expected: SNAPSHOT_VERSION,
        });
    }
    let header: SnapshotHeader = serde_json::from_value(raw).map_err(|e| Error::CorruptHeader(e.to_string()))?;
    if header.endianness != "little" {
        return Err(Error::CorruptHeader(format!("unsupported endianness {:?}", header.endianness)));
    }
    let grid = Grid2D::new(header.grid.n, header.grid.length)
        .map_err(|e| Error::CorruptHeader(format!("grid: {e}")))?;
    if header.elements != elements(grid) {
        return Err(Error::CorruptHeader(format!(
            "{} elements declared, grid needs {}",
            header.elements,
            elements(grid)
        )));
    }
    if payload.len() != header.elements * 8 {
        return Err(Error::LengthMismatch {
            expected: header.elements * 8,
            found: payload.len(),
        });
    }
    let np = grid.points();
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut next = || values.by_ref().take(np).collect::<Vec<f64>>();
    let frame = FrameComponents::from_comps(grid, std::array::from_fn(|_| next()))?;
    let velocity = Vec2Field::from_comps(grid, std::array::from_fn(|_| next()))?;
    let mut state = SimState::new(FrameField::from_components(frame), velocity)?;
    state.t = header.t;
    state.step = header.step;
    Ok((header, state))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<SimState> {
    read_snapshot_with_header(path).map(|(_, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::sim::init;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state() -> SimState {
        let grid = Grid2D::new(16, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut s = SimState::new(
            init::random_rotation_field(&mut rng, grid, &Frame::identity(), 0.3, 2),
            init::random_velocity(&mut rng, grid, 1.0, 2),
        )
        .unwrap();
        s.t = 0.125;
        s.step = 7;
        s
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        let s = state();
        write_snapshot(&s, &p).unwrap();
        let back = read_snapshot(&p).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn truncated_payload_is_a_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        write_snapshot(&state(), &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn garbage_prefix_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        std::fs::write(&p, [0xff; 16]).unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::CorruptHeader(_))));
    }
}
