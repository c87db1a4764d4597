//! The adaptation loop: find the worst-fit site, move its particles.
//!
//! Each cycle selects the scale/position maximizing the fitting measure and
//! moves `2^S` particles between that block and its neighbors under exact
//! particle conservation. Runs are pure functions of `(config, seed)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, SimConfig};
use crate::height::HeightField;
use crate::metrics;
use crate::multiscale::{argmax_fitness, MoveSite, ScaleError};
use crate::profiles::{resolve_target, Profile, ProfileError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("no move possible: field is flat at every scanned scale")]
    HaltedState,
    #[error("interior move at scale 0 cannot split between two neighbors")]
    UnsplittableMove,
    #[error(transparent)]
    Scale(#[from] ScaleError),
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Relative surface difference plus bookkeeping for one evolving gripper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GripperState {
    h: HeightField,
    total: i64,
    cycle: u32,
}

impl GripperState {
    /// Flat gripper at level zero against `target`: `h = -target`.
    pub fn init(target: &Profile) -> Self {
        let h = HeightField::new(target.heights().iter().map(|t| -t).collect())
            .expect("profile length is a power of two");
        let total = h.sum();
        Self { h, total, cycle: 0 }
    }

    pub fn from_field(h: HeightField) -> Self {
        let total = h.sum();
        Self { h, total, cycle: 0 }
    }

    pub fn heights(&self) -> &HeightField {
        &self.h
    }

    /// Cached particle total; equals `heights().sum()` at all times.
    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }
}

/// One executed move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub cycle: u32,
    pub scale_exp: u32,
    pub position: usize,
    pub sign: i8,
    pub particles_moved: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continued(MoveRecord),
    Halted,
}

/// Applies one block move with explicit neighbor placements.
///
/// Every column of block `position` at scale `scale_exp` changes by `-sign`;
/// each listed column offset of the left and right neighbor blocks changes
/// by `+sign`. Callers pick the offsets (randomly in the simulator,
/// exhaustively in state enumeration); conservation demands the offsets
/// account for exactly `2^scale_exp` units.
pub(crate) fn apply_placed_move(
    h: &mut HeightField,
    scale_exp: u32,
    position: usize,
    sign: i8,
    left_cols: &[usize],
    right_cols: &[usize],
) {
    let width = 1usize << scale_exp;
    debug_assert_eq!(left_cols.len() + right_cols.len(), width);
    let start = position * width;
    let sign = sign as i64;
    let cols = h.as_mut_slice();
    for c in &mut cols[start..start + width] {
        *c -= sign;
    }
    for &off in left_cols {
        cols[start - width + off] += sign;
    }
    for &off in right_cols {
        cols[start + width + off] += sign;
    }
}

/// Executes the move selected by [`argmax_fitness`] on `state`.
///
/// Outflow (`sign > 0`): every column of the winning block drops by one unit
/// and each neighbor gains `2^(S-1)` units at distinct random columns.
/// Inflow mirrors it. An edge block exchanges all `2^S` units with its single
/// neighbor. The left neighbor is always settled before the right one.
pub fn apply_move(
    state: &mut GripperState,
    site: &MoveSite,
    rng: &mut ChaCha8Rng,
) -> Result<MoveRecord, DynamicsError> {
    if site.is_flat() || site.sign == 0 {
        return Err(DynamicsError::HaltedState);
    }
    let width = 1usize << site.scale_exp;
    let n_blocks = state.h.len() >> site.scale_exp;
    let p = site.position;
    let at_edge = p == 0 || p == n_blocks - 1;
    if site.scale_exp == 0 && !at_edge {
        return Err(DynamicsError::UnsplittableMove);
    }

    let all: Vec<usize> = (0..width).collect();
    let sample_half = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        rand::seq::index::sample(rng, width, width / 2).into_vec()
    };
    let (left, right) = if at_edge {
        if p == 0 {
            (Vec::new(), all)
        } else {
            (all, Vec::new())
        }
    } else {
        let left = sample_half(rng);
        let right = sample_half(rng);
        (left, right)
    };
    apply_placed_move(&mut state.h, site.scale_exp, p, site.sign, &left, &right);

    state.cycle += 1;
    debug_assert_eq!(state.h.sum(), state.total, "conservation broken");
    Ok(MoveRecord {
        cycle: state.cycle,
        scale_exp: site.scale_exp,
        position: p,
        sign: site.sign,
        particles_moved: width as u64,
    })
}

/// One cycle: argmax the fitting measure, move particles or halt.
pub fn step(
    state: &mut GripperState,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Result<StepOutcome, DynamicsError> {
    let site = argmax_fitness(&state.h, cfg.s_min, cfg.s_max, cfg.edge_argmax, rng)?;
    if site.is_flat() {
        return Ok(StepOutcome::Halted);
    }
    let record = apply_move(state, &site, rng)?;
    Ok(StepOutcome::Continued(record))
}

/// Per-cycle record of one run. `ra[0]` is the initial roughness; entry `t`
/// of the move series describes the move executed at cycle `t` (1-based), so
/// `ra.len() == moves + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub ra: Vec<f64>,
    pub scale_exp: Vec<u32>,
    pub position: Vec<usize>,
    pub sign: Vec<i8>,
    pub moved: Vec<u64>,
    /// Cycle count after which no further move was possible.
    pub halted_at: Option<u32>,
    pub cfg: SimConfig,
    pub seed: u64,
}

impl Trajectory {
    pub fn moves(&self) -> usize {
        self.moved.len()
    }

    pub fn final_ra(&self) -> f64 {
        *self.ra.last().expect("trajectory always has the initial row")
    }
}

/// Deterministic per-run stream: one base seed, one stream index per run.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_with_target(
    cfg: &SimConfig,
    target: &Profile,
    seed: u64,
    stream: u64,
) -> Result<Trajectory, RunError> {
    let mut rng = trajectory_rng(seed, stream);
    let mut state = GripperState::init(target);
    let mut traj = Trajectory {
        ra: vec![metrics::roughness_ra(state.heights())],
        scale_exp: Vec::with_capacity(cfg.cycles as usize),
        position: Vec::with_capacity(cfg.cycles as usize),
        sign: Vec::with_capacity(cfg.cycles as usize),
        moved: Vec::with_capacity(cfg.cycles as usize),
        halted_at: None,
        cfg: cfg.clone(),
        seed,
    };
    for _ in 0..cfg.cycles {
        match step(&mut state, cfg, &mut rng).expect("scale range validated") {
            StepOutcome::Halted => {
                traj.halted_at = Some(state.cycle());
                break;
            }
            StepOutcome::Continued(rec) => {
                assert_eq!(
                    state.heights().sum(),
                    state.total(),
                    "particle conservation violated at cycle {}",
                    rec.cycle
                );
                traj.ra.push(metrics::roughness_ra(state.heights()));
                traj.scale_exp.push(rec.scale_exp);
                traj.position.push(rec.position);
                traj.sign.push(rec.sign);
                traj.moved.push(rec.particles_moved);
            }
        }
    }
    Ok(traj)
}

/// Runs one trajectory with the given seed (stream 0).
pub fn run(cfg: &SimConfig, seed: u64) -> Result<Trajectory, RunError> {
    cfg.validate()?;
    let target = resolve_target(cfg)?;
    run_with_target(cfg, &target, seed, 0)
}

/// Runs `cfg.runs` trajectories in parallel. Run `i` draws from stream `i`
/// of `cfg.seed`, so results do not depend on scheduling.
pub fn run_batch(cfg: &SimConfig) -> Result<Vec<Trajectory>, RunError> {
    cfg.validate()?;
    let target = resolve_target(cfg)?;
    (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| run_with_target(cfg, &target, cfg.seed, i))
        .collect()
}

/// Formats a trajectory as its CSV interface: one header plus one row per
/// recorded cycle. Row 0 carries the initial roughness and empty move fields.
pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::from("cycle,ra,scale_exp,position,sign,particles_moved\n");
    out.push_str(&format!("0,{:.6},,,,\n", traj.ra[0]));
    for t in 0..traj.moves() {
        out.push_str(&format!(
            "{},{:.6},{},{},{},{}\n",
            t + 1,
            traj.ra[t + 1],
            traj.scale_exp[t],
            traj.position[t],
            traj.sign[t],
            traj.moved[t]
        ));
    }
    out
}

/// One parsed trajectory CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub cycle: u32,
    pub ra: f64,
    pub mv: Option<(u32, usize, i8, u64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// Parses the output of [`trajectory_to_csv`].
pub fn trajectory_from_csv(text: &str) -> Result<Vec<TrajectoryRow>, CsvError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "cycle,ra,scale_exp,position,sign,particles_moved" {
                return Err(CsvError::Malformed {
                    line: 1,
                    msg: format!("unexpected header {line:?}"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CsvError::Malformed {
                line: i + 1,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let bad = |msg: String| CsvError::Malformed { line: i + 1, msg };
        let cycle = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad cycle {:?}", fields[0])))?;
        let ra = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad ra {:?}", fields[1])))?;
        let mv = if fields[2].is_empty() {
            None
        } else {
            Some((
                fields[2]
                    .parse()
                    .map_err(|_| bad(format!("bad scale {:?}", fields[2])))?,
                fields[3]
                    .parse()
                    .map_err(|_| bad(format!("bad position {:?}", fields[3])))?,
                fields[4]
                    .parse()
                    .map_err(|_| bad(format!("bad sign {:?}", fields[4])))?,
                fields[5]
                    .parse()
                    .map_err(|_| bad(format!("bad particle count {:?}", fields[5])))?,
            ))
        };
        rows.push(TrajectoryRow { cycle, ra, mv });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TargetChoice;
    use crate::multiscale::Dyadic;
    use crate::profiles::{target_a, target_b};

    fn toy_cfg() -> SimConfig {
        SimConfig {
            n_exp: 6,
            amplitude: 4,
            s_min: 1,
            s_max: 3,
            cycles: 50,
            runs: 4,
            target: TargetChoice::A,
            seed: 9,
            edge_argmax: true,
        }
    }

    #[test]
    fn init_negates_target() {
        let t = target_a(10, 128).unwrap();
        let s = GripperState::init(&t);
        assert_eq!(s.total(), -t.sum());
        assert_eq!(s.heights()[31], -128);
        assert_eq!(s.cycle(), 0);
        // initial roughness ~ (2/pi) * amplitude
        let ra = metrics::roughness_ra(s.heights());
        assert!(
            (ra / 128.0 - std::f64::consts::FRAC_2_PI).abs() < 0.02 * std::f64::consts::FRAC_2_PI,
            "ra {ra}"
        );
    }

    #[test]
    fn zero_target_halts_immediately() {
        let t = Profile::new(vec![0; 16], "zero").unwrap();
        let mut s = GripperState::init(&t);
        let cfg = toy_cfg();
        let mut rng = trajectory_rng(1, 0);
        assert_eq!(step(&mut s, &cfg, &mut rng).unwrap(), StepOutcome::Halted);
        assert_eq!(s.cycle(), 0);
        // halted state is a fixed point
        assert_eq!(step(&mut s, &cfg, &mut rng).unwrap(), StepOutcome::Halted);
    }

    #[test]
    fn interior_outflow_hand_trace() {
        let mut v = vec![0i64; 16];
        for c in &mut v[4..8] {
            *c = 5;
        }
        let mut s = GripperState::from_field(HeightField::new(v).unwrap());
        let site = MoveSite {
            scale_exp: 2,
            position: 1,
            sign: 1,
            max_value: Dyadic::new(1, 0),
        };
        let mut rng = trajectory_rng(3, 0);
        let rec = apply_move(&mut s, &site, &mut rng).unwrap();
        assert_eq!(rec.particles_moved, 4);
        let h = s.heights().as_slice();
        assert_eq!(&h[4..8], &[4, 4, 4, 4]);
        let left_gain: i64 = h[0..4].iter().sum();
        let right_gain: i64 = h[8..12].iter().sum();
        assert_eq!(left_gain, 2);
        assert_eq!(right_gain, 2);
        assert!(h[0..4].iter().all(|&c| c == 0 || c == 1));
        assert!(h[12..16].iter().all(|&c| c == 0));
        assert_eq!(s.heights().sum(), s.total());
    }

    #[test]
    fn leftmost_outflow_routes_everything_right() {
        let mut v = vec![0i64; 16];
        for c in &mut v[0..4] {
            *c = 5;
        }
        let mut s = GripperState::from_field(HeightField::new(v).unwrap());
        let site = MoveSite {
            scale_exp: 2,
            position: 0,
            sign: 1,
            max_value: Dyadic::new(1, 0),
        };
        let mut rng = trajectory_rng(3, 0);
        apply_move(&mut s, &site, &mut rng).unwrap();
        let h = s.heights().as_slice();
        assert_eq!(&h[0..4], &[4, 4, 4, 4]);
        assert_eq!(&h[4..8], &[1, 1, 1, 1]);
        assert!(h[8..].iter().all(|&c| c == 0));
    }

    #[test]
    fn inflow_mirrors_outflow() {
        let mut v = vec![3i64; 16];
        for c in &mut v[4..8] {
            *c = 0;
        }
        let mut s = GripperState::from_field(HeightField::new(v).unwrap());
        let site = MoveSite {
            scale_exp: 2,
            position: 1,
            sign: -1,
            max_value: Dyadic::new(1, 0),
        };
        let mut rng = trajectory_rng(11, 0);
        apply_move(&mut s, &site, &mut rng).unwrap();
        let h = s.heights().as_slice();
        assert_eq!(&h[4..8], &[1, 1, 1, 1]);
        assert_eq!(h[0..4].iter().sum::<i64>(), 10);
        assert_eq!(h[8..12].iter().sum::<i64>(), 10);
        assert_eq!(s.heights().sum(), s.total());
    }

    #[test]
    fn conservation_over_long_run() {
        let mut cfg = SimConfig::default();
        cfg.target = TargetChoice::B;
        cfg.cycles = 1500;
        let target = target_b(cfg.n_exp, cfg.amplitude).unwrap();
        let mut state = GripperState::init(&target);
        let expected = state.total();
        let mut rng = trajectory_rng(17, 0);
        for _ in 0..cfg.cycles {
            match step(&mut state, &cfg, &mut rng).unwrap() {
                StepOutcome::Halted => break,
                StepOutcome::Continued(rec) => {
                    assert_eq!(state.heights().sum(), expected, "cycle {}", rec.cycle);
                    assert_eq!(rec.particles_moved, 1 << rec.scale_exp);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = toy_cfg();
        let a = run(&cfg, 5).unwrap();
        let b = run(&cfg, 5).unwrap();
        assert_eq!(trajectory_to_csv(&a), trajectory_to_csv(&b));
        let c = run(&cfg, 6).unwrap();
        assert_ne!(trajectory_to_csv(&a), trajectory_to_csv(&c));
    }

    #[test]
    fn zero_cycles_gives_initial_row_only() {
        let mut cfg = toy_cfg();
        cfg.cycles = 0;
        let t = run(&cfg, 1).unwrap();
        assert_eq!(t.ra.len(), 1);
        assert_eq!(t.moves(), 0);
        assert_eq!(t.halted_at, None);
    }

    #[test]
    fn default_run_reduces_roughness() {
        let mut cfg = SimConfig::default();
        cfg.cycles = 300;
        let t = run(&cfg, 0).unwrap();
        assert!(t.final_ra() < t.ra[0], "{} vs {}", t.final_ra(), t.ra[0]);
    }

    #[test]
    fn batch_matches_streams() {
        let cfg = toy_cfg();
        let batch = run_batch(&cfg).unwrap();
        assert_eq!(batch.len(), 4);
        // stream 0 of the batch equals a plain run with the same seed
        let single = run(&cfg, cfg.seed).unwrap();
        assert_eq!(batch[0], single);
    }

    #[test]
    fn csv_round_trip() {
        let cfg = toy_cfg();
        let t = run(&cfg, 2).unwrap();
        let text = trajectory_to_csv(&t);
        let rows = trajectory_from_csv(&text).unwrap();
        assert_eq!(rows.len(), t.ra.len());
        assert_eq!(rows[0].mv, None);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.cycle as usize, i);
            assert!((row.ra - t.ra[i]).abs() < 1e-6);
        }
        for (i, row) in rows.iter().skip(1).enumerate() {
            let (s, p, sg, m) = row.mv.unwrap();
            assert_eq!(s, t.scale_exp[i]);
            assert_eq!(p, t.position[i]);
            assert_eq!(sg, t.sign[i]);
            assert_eq!(m, t.moved[i]);
        }
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(trajectory_from_csv("nope\n").is_err());
        let text = "cycle,ra,scale_exp,position,sign,particles_moved\n0,x,,,,\n";
        assert!(matches!(
            trajectory_from_csv(text),
            Err(CsvError::Malformed { line: 2, .. })
        ));
    }
}
