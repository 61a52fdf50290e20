use std::path::Path;

use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::spectral::{Domain, FieldCoeffs, SpectralBasis};

const MAGIC: &str = "chd-snapshot 1";

/// Text header, then `α` and `γ` as little-endian `f64`.
pub fn encode_snapshot(state: &SimState) -> Vec<u8> {
    let basis = &state.alpha.basis;
    let [lx, ly] = basis.domain().lengths();
    let kind = if basis.domain().dim() == 1 { "interval" } else { "rectangle" };
    let [mx, my] = basis.modes();
    let head = format!(
        "{MAGIC}\ndomain {kind} {lx:?} {ly:?}\nmodes {mx} {my}\nt {:?}\nstep {}\nend\n",
        state.t, state.step
    );
    let mut out = head.into_bytes();
    for v in state.alpha.coeffs.iter().chain(&state.gamma.coeffs) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<SimState> {
    let corrupt = |reason: &str| Error::Corrupt {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let end = b"\nend\n";
    let split = bytes
        .windows(end.len())
        .position(|w| w == end)
        .ok_or_else(|| corrupt("header terminator not found"))?
        + end.len();
    let head = std::str::from_utf8(&bytes[..split]).map_err(|_| corrupt("header is not UTF-8"))?;
    let mut lines = head.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("bad magic line"));
    }
    let mut field = |name: &str| -> Result<Vec<String>> {
        let line = lines.next().ok_or_else(|| corrupt("truncated header"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(name) {
            return Err(corrupt(&format!("expected `{name}` line")));
        }
        Ok(parts.map(str::to_string).collect())
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| corrupt("bad number in header"));
    let d = field("domain")?;
    let domain = match (d.first().map(String::as_str), d.len()) {
        (Some("interval"), 3) => Domain::interval(num(&d[1])?)?,
        (Some("rectangle"), 3) => Domain::rectangle(num(&d[1])?, num(&d[2])?)?,
        _ => return Err(corrupt("bad domain line")),
    };
    let m = field("modes")?;
    let modes: Vec<usize> = m
        .iter()
        .map(|s| s.parse().map_err(|_| corrupt("bad modes line")))
        .collect::<Result<_>>()?;
    if modes.len() != 2 {
        return Err(corrupt("bad modes line"));
    }
    let t = num(field("t")?.first().ok_or_else(|| corrupt("missing t"))?)?;
    let step: u64 = field("step")?
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| corrupt("bad step line"))?;
    let basis = SpectralBasis::with_modes(domain, [modes[0], modes[1]])?;
    let payload = &bytes[split..];
    let n = basis.len();
    if payload.len() != 16 * n {
        return Err(corrupt(&format!("payload has {} bytes, expected {}", payload.len(), 16 * n)));
    }
    let vals: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let alpha = FieldCoeffs::from_vec(&basis, vals[..n].to_vec())?;
    let gamma = FieldCoeffs::from_vec(&basis, vals[n..].to_vec())?;
    SimState::new(t, step, alpha, gamma)
}

pub fn write_field_snapshot(state: &SimState, path: &Path) -> Result<()> {
    std::fs::write(path, encode_snapshot(state)).map_err(|e| Error::io(path, e))
}

pub fn read_field_snapshot(path: &Path) -> Result<SimState> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes, path)
}

/// Read a snapshot that must live in `basis`.
pub fn read_field_snapshot_for(path: &Path, basis: &SpectralBasis) -> Result<SimState> {
    let s = read_field_snapshot(path)?;
    if &s.alpha.basis != basis {
        return Err(Error::DimensionMismatch(format!(
            "snapshot has modes {:?} on {:?}, expected {:?} on {:?}",
            s.alpha.basis.modes(),
            s.alpha.basis.domain(),
            basis.modes(),
            basis.domain()
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::project_initial_data;
    use crate::model::InitialProfile;
    use crate::spectral::Discretization;

    fn state() -> SimState {
        let d = Discretization::new(Domain::rectangle(1.0, 0.7).unwrap(), 5).unwrap();
        let mut s = project_initial_data(
            &InitialProfile::RandomSeeded {
                mean: 0.1,
                amplitude: 0.5,
                cutoff: 5,
                seed: None,
            },
            &InitialProfile::Constant { value: 0.3 },
            &d,
            3,
        )
        .unwrap();
        s.t = 0.1 + 0.2;
        s.step = 300;
        s
    }

    #[test]
    fn write_then_read_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        let s = state();
        write_field_snapshot(&s, &p).unwrap();
        let back = read_field_snapshot(&p).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.t.to_bits(), s.t.to_bits());
    }

    #[test]
    fn mode_mismatch_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        let s = state();
        write_field_snapshot(&s, &p).unwrap();
        let other = SpectralBasis::new(Domain::rectangle(1.0, 0.7).unwrap(), 6).unwrap();
        assert!(matches!(read_field_snapshot_for(&p, &other), Err(Error::DimensionMismatch(_))));
        let mut bytes = std::fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 3);
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(read_field_snapshot(&p), Err(Error::Corrupt { .. })));
        std::fs::write(&p, b"garbage").unwrap();
        assert!(matches!(read_field_snapshot(&p), Err(Error::Corrupt { .. })));
    }
}
