//! Binary and CSV export of meridian fields.
//!
//! Binary layout, little-endian throughout:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `CAPGRID1` |
//! | 4     | format version (`u32`) |
//! | 8, 8  | node counts along `x` and `theta` (`u64`) |
//! | 8     | truncation radius (`f64`) |
//! | 8     | FNV-1a hash of the metric's JSON form (`u64`) |
//! | 8 n   | potential values, row-major over `(i_x, j_theta)` |

use std::fmt::Write as _;

use super::MeridianField;
use crate::error::{Error, Result};
use crate::geometry::RadialConformalMetric;
use crate::surface::MeridianCurve;

const MAGIC: &[u8; 8] = b"CAPGRID1";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 8 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHeader {
    pub version: u32,
    pub dims: (u64, u64),
    pub truncation_radius: f64,
    pub metric_hash: u64,
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn metric_hash(metric: &RadialConformalMetric) -> u64 {
    // serialization of these plain structs cannot fail
    let json = serde_json::to_string(metric).expect("metric serializes");
    fnv1a(json.as_bytes())
}

pub fn write_grid(field: &MeridianField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * field.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&((field.nx + 1) as u64).to_le_bytes());
    out.extend_from_slice(&((field.ntheta + 1) as u64).to_le_bytes());
    out.extend_from_slice(&field.truncation_radius.to_le_bytes());
    out.extend_from_slice(&metric_hash(&field.metric).to_le_bytes());
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn take<const N: usize>(bytes: &[u8], at: usize) -> [u8; N] {
    bytes[at..at + N].try_into().expect("length checked")
}

pub fn read_header(bytes: &[u8]) -> Result<GridHeader> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(Error::InvalidInput("not a capacity grid file".into()));
    }
    let version = u32::from_le_bytes(take(bytes, 8));
    if version != VERSION {
        return Err(Error::InvalidInput(format!("unsupported grid version {version}")));
    }
    Ok(GridHeader {
        version,
        dims: (u64::from_le_bytes(take(bytes, 12)), u64::from_le_bytes(take(bytes, 20))),
        truncation_radius: f64::from_le_bytes(take(bytes, 28)),
        metric_hash: u64::from_le_bytes(take(bytes, 36)),
    })
}

/// Reads a field back; the caller supplies the boundary and metric, and the
/// metric must hash to the stored value.
pub fn read_grid(bytes: &[u8], boundary: MeridianCurve, metric: RadialConformalMetric) -> Result<MeridianField> {
    let h = read_header(bytes)?;
    if h.metric_hash != metric_hash(&metric) {
        return Err(Error::InvalidInput("grid was computed for a different metric".into()));
    }
    let (a, b) = (h.dims.0 as usize, h.dims.1 as usize);
    if a < 3 || b < 2 || bytes.len() != HEADER_LEN + 8 * a * b {
        return Err(Error::InvalidInput("grid payload length does not match its dimensions".into()));
    }
    let values = (0..a * b).map(|k| f64::from_le_bytes(take(bytes, HEADER_LEN + 8 * k))).collect();
    Ok(MeridianField { boundary, metric, truncation_radius: h.truncation_radius, nx: a - 1, ntheta: b - 1, values })
}

/// One row per node: `i,j,r,theta,phi`.
pub fn grid_to_csv(field: &MeridianField) -> String {
    let mut s = String::from("i,j,r,theta,phi\n");
    for i in 0..=field.nx {
        for j in 0..=field.ntheta {
            let _ = writeln!(s, "{i},{j},{},{},{}", field.radius(i, j), field.theta(j), field.at(i, j));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{capacity_axisym_fd, AxisymDomainSpec, Potential};
    use crate::geometry::SchwarzschildSpec;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn binary_round_trip() {
        let m = SchwarzschildSpec::new(1.0).unwrap().metric();
        let mut d = AxisymDomainSpec::new(MeridianCurve::sphere(1.0), m.clone(), (64, 64));
        d.options.estimate_grid_error = false;
        let sol = capacity_axisym_fd(&d).unwrap();
        let Potential::Meridian(f) = &sol.potential else { unreachable!() };
        let bytes = write_grid(f);
        let back = read_grid(&bytes, f.boundary.clone(), m).unwrap();
        assert_eq!(&back, f);
        assert!(read_grid(&bytes, f.boundary.clone(), RadialConformalMetric::flat(0.5)).is_err());
        assert!(grid_to_csv(f).lines().count() == 65 * 65 + 1);
    }
}
