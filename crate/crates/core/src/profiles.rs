//! Target surface profiles, quantized to integer particle units.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::config::{SimConfig, TargetChoice};
use crate::height::HeightField;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("n_exp {0} too small for the built-in targets (need at least 4)")]
    ExponentTooSmall(u32),
    #[error("amplitude must be at least 1, got {0}")]
    AmplitudeNotPositive(i64),
    #[error("profile length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{path}:{line}: not an integer: {text:?}")]
    Parse {
        path: String,
        line: usize,
        text: String,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A surface profile: one signed height per column, in particle units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    heights: Vec<i64>,
    label: String,
}

impl Profile {
    pub fn new(heights: Vec<i64>, label: impl Into<String>) -> Result<Self, ProfileError> {
        if !heights.len().is_power_of_two() {
            return Err(ProfileError::NotPowerOfTwo(heights.len()));
        }
        Ok(Self {
            heights,
            label: label.into(),
        })
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_exp(&self) -> u32 {
        self.heights.len().trailing_zeros()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sum(&self) -> i64 {
        self.heights.iter().sum()
    }
}

/// Rounds half away from zero, so profiles are bit-reproducible.
fn quantize(v: f64) -> i64 {
    v.round() as i64
}

fn check_target_args(n_exp: u32, amplitude: i64) -> Result<(), ProfileError> {
    if n_exp < 4 {
        return Err(ProfileError::ExponentTooSmall(n_exp));
    }
    if amplitude < 1 {
        return Err(ProfileError::AmplitudeNotPositive(amplitude));
    }
    Ok(())
}

/// Single-frequency target: `amplitude * sin(2*pi*x/N * 8)` for `x = 1..=N`.
pub fn target_a(n_exp: u32, amplitude: i64) -> Result<Profile, ProfileError> {
    check_target_args(n_exp, amplitude)?;
    let n = 1usize << n_exp;
    let heights = (1..=n)
        .map(|x| {
            let u = 2.0 * std::f64::consts::PI * x as f64 / n as f64;
            quantize(amplitude as f64 * (u * 8.0).sin())
        })
        .collect();
    Ok(Profile {
        heights,
        label: "A".into(),
    })
}

/// Two-frequency target: `amplitude * 0.8 * (sin(2*pi*x/N * 4) + sin(2*pi*x/N * 8))`.
pub fn target_b(n_exp: u32, amplitude: i64) -> Result<Profile, ProfileError> {
    check_target_args(n_exp, amplitude)?;
    let n = 1usize << n_exp;
    let heights = (1..=n)
        .map(|x| {
            let u = 2.0 * std::f64::consts::PI * x as f64 / n as f64;
            quantize(amplitude as f64 * 0.8 * ((u * 4.0).sin() + (u * 8.0).sin()))
        })
        .collect();
    Ok(Profile {
        heights,
        label: "B".into(),
    })
}

/// Reads a profile file: UTF-8 text, one decimal integer per line, LF
/// terminated. The line count must be a power of two.
pub fn load_profile(path: impl AsRef<Path>) -> Result<Profile, ProfileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut heights = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: i64 = t.parse().map_err(|_| ProfileError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            text: t.to_string(),
        })?;
        heights.push(v);
    }
    if !heights.len().is_power_of_two() {
        return Err(ProfileError::NotPowerOfTwo(heights.len()));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    Ok(Profile { heights, label })
}

/// Writes a profile in the same format `load_profile` reads.
pub fn save_profile(profile: &Profile, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    for h in &profile.heights {
        writeln!(f, "{h}")?;
    }
    Ok(())
}

/// Resolves the configured target choice to a concrete profile.
pub fn resolve_target(cfg: &SimConfig) -> Result<Profile, ProfileError> {
    match &cfg.target {
        TargetChoice::A => target_a(cfg.n_exp, cfg.amplitude),
        TargetChoice::B => target_b(cfg.n_exp, cfg.amplitude),
        TargetChoice::File(p) => load_profile(p),
    }
}

impl From<&Profile> for HeightField {
    fn from(p: &Profile) -> Self {
        HeightField::new(p.heights.clone()).expect("profile length is a power of two")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_OVER_PI: f64 = std::f64::consts::FRAC_2_PI;

    fn mean_abs(p: &Profile) -> f64 {
        p.heights().iter().map(|h| h.abs() as f64).sum::<f64>() / p.len() as f64
    }

    /// Midpoint-rule average of |f| over one period; independent check of the
    /// 2/pi constant used in the roughness criteria.
    fn quadrature_mean_abs(f: impl Fn(f64) -> f64) -> f64 {
        let steps = 1_000_000;
        let mut acc = 0.0;
        for i in 0..steps {
            let u = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
            acc += f(u).abs();
        }
        acc / steps as f64
    }

    #[test]
    fn target_a_endpoints() {
        let p = target_a(10, 128).unwrap();
        // x = N: sin(16*pi) = 0
        assert_eq!(p.heights()[1023], 0);
        // x = N/32: argument is pi/2
        assert_eq!(p.heights()[31], 128);
        assert_eq!(p.label(), "A");
    }

    #[test]
    fn target_b_endpoint() {
        let p = target_b(10, 128).unwrap();
        assert_eq!(p.heights()[1023], 0);
        assert_eq!(p.label(), "B");
    }

    #[test]
    fn mean_abs_matches_quadrature() {
        // Both sine targets average |height| to (2/pi) * amplitude.
        let q_a = quadrature_mean_abs(|u| (8.0 * u).sin());
        let q_b = quadrature_mean_abs(|u| 0.8 * ((4.0 * u).sin() + (8.0 * u).sin()));
        assert!((q_a - TWO_OVER_PI).abs() < 1e-4, "quadrature A: {q_a}");
        assert!((q_b - TWO_OVER_PI).abs() < 1e-4, "quadrature B: {q_b}");

        let a = target_a(10, 128).unwrap();
        let b = target_b(10, 128).unwrap();
        assert!((mean_abs(&a) / 128.0 - q_a).abs() < 0.02);
        assert!((mean_abs(&b) / 128.0 - q_b).abs() < 0.02);
    }

    #[test]
    fn targets_share_initial_roughness() {
        for amplitude in [64, 128, 256] {
            let a = target_a(10, amplitude).unwrap();
            let b = target_b(10, amplitude).unwrap();
            let (ma, mb) = (mean_abs(&a), mean_abs(&b));
            assert!(
                (ma - mb).abs() / ma < 0.01,
                "amplitude {amplitude}: {ma} vs {mb}"
            );
        }
    }

    #[test]
    fn periodicity_up_to_rounding() {
        let a = target_a(10, 128).unwrap();
        let period = 1024 / 8;
        for x in 0..(1024 - period) {
            let d = (a.heights()[x] - a.heights()[x + period]).abs();
            assert!(d <= 1, "A period broken at {x}: diff {d}");
        }
        let b = target_b(10, 128).unwrap();
        let period = 1024 / 4;
        for x in 0..(1024 - period) {
            let d = (b.heights()[x] - b.heights()[x + period]).abs();
            assert!(d <= 1, "B period broken at {x}: diff {d}");
        }
    }

    #[test]
    fn targets_sum_near_zero() {
        let a = target_a(10, 128).unwrap();
        let b = target_b(10, 128).unwrap();
        assert!(a.sum().unsigned_abs() <= 512);
        assert!(b.sum().unsigned_abs() <= 512);
    }

    #[test]
    fn preconditions_rejected() {
        assert!(matches!(
            target_a(3, 128),
            Err(ProfileError::ExponentTooSmall(3))
        ));
        assert!(matches!(
            target_b(10, 0),
            Err(ProfileError::AmplitudeNotPositive(0))
        ));
    }

    #[test]
    fn load_small_file() {
        let dir = std::env::temp_dir().join("softgrip_profile_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ok.txt");
        fs::write(&path, "0\n1\n2\n3\n").unwrap();
        let p = load_profile(&path).unwrap();
        assert_eq!(p.heights(), &[0, 1, 2, 3]);
    }

    #[test]
    fn parse_error_cites_line() {
        let dir = std::env::temp_dir().join("softgrip_profile_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        fs::write(&path, "0\nabc\n2\n3\n").unwrap();
        match load_profile(&path) {
            Err(ProfileError::Parse { line, text, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(text, "abc");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let dir = std::env::temp_dir().join("softgrip_profile_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("len.txt");
        fs::write(&path, "0\n1\n2\n").unwrap();
        assert!(matches!(
            load_profile(&path),
            Err(ProfileError::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = std::env::temp_dir().join("softgrip_profile_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.txt");
        let p = target_b(6, 17).unwrap();
        save_profile(&p, &path).unwrap();
        let q = load_profile(&path).unwrap();
        assert_eq!(p.heights(), q.heights());
    }
}
