//! Roughness measure and the derived ensemble series.

use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::height::HeightField;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("ensemble of zero trajectories")]
    EmptyEnsemble,
}

/// Arithmetic mean absolute deviation of the heights from their mean.
///
/// Computed from exact integers: `sum_x |N*h[x] - total| / N^2`.
pub fn roughness_ra(h: &HeightField) -> f64 {
    let n = h.len() as i128;
    let total: i128 = h.sum() as i128;
    let num: i128 = h
        .as_slice()
        .iter()
        .map(|&x| (n * x as i128 - total).abs())
        .sum();
    num as f64 / (n * n) as f64
}

/// Trailing mean over a window of `window` samples; the window truncates at
/// the start of the series.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    let mut out = Vec::with_capacity(series.len());
    let mut acc = 0.0;
    for t in 0..series.len() {
        acc += series[t];
        if t >= window {
            acc -= series[t - window];
        }
        let w = window.min(t + 1);
        out.push(acc / w as f64);
    }
    out
}

/// Pointwise mean curves across a batch of runs.
///
/// Runs that halted early are padded: roughness carries its final value
/// forward, moved particles count as zero. `halted_runs` records how many
/// runs needed padding.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub ra_mean: Vec<f64>,
    pub ra_std: Vec<f64>,
    pub moved_mean: Vec<f64>,
    pub runs: usize,
    pub halted_runs: usize,
}

impl Ensemble {
    /// Rows in the mean curves (cycles + 1 initial row).
    pub fn len(&self) -> usize {
        self.ra_mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ra_mean.is_empty()
    }
}

pub fn ensemble_mean(trajs: &[Trajectory]) -> Result<Ensemble, MetricsError> {
    if trajs.is_empty() {
        return Err(MetricsError::EmptyEnsemble);
    }
    let rows = trajs.iter().map(|t| t.ra.len()).max().unwrap();
    let runs = trajs.len();
    let mut ra_mean = vec![0.0; rows];
    let mut ra_sq = vec![0.0; rows];
    let mut moved_mean = vec![0.0; rows.saturating_sub(1)];
    for t in trajs {
        for i in 0..rows {
            let ra = if i < t.ra.len() {
                t.ra[i]
            } else {
                *t.ra.last().unwrap()
            };
            ra_mean[i] += ra;
            ra_sq[i] += ra * ra;
        }
        for i in 0..moved_mean.len() {
            if i < t.moved.len() {
                moved_mean[i] += t.moved[i] as f64;
            }
        }
    }
    for i in 0..rows {
        ra_mean[i] /= runs as f64;
        ra_sq[i] /= runs as f64;
    }
    for m in &mut moved_mean {
        *m /= runs as f64;
    }
    let ra_std = ra_mean
        .iter()
        .zip(&ra_sq)
        .map(|(m, sq)| (sq - m * m).max(0.0).sqrt())
        .collect();
    Ok(Ensemble {
        ra_mean,
        ra_std,
        moved_mean,
        runs,
        halted_runs: trajs.iter().filter(|t| t.halted_at.is_some()).count(),
    })
}

/// Ensemble CSV interface: `cycle,ra_mean,ra_std,moved_mean`, fixed six
/// decimals. The row for cycle 0 has no move, so `moved_mean` is empty there.
pub fn ensemble_to_csv(e: &Ensemble) -> String {
    let mut out = String::from("cycle,ra_mean,ra_std,moved_mean\n");
    for i in 0..e.len() {
        if i == 0 {
            out.push_str(&format!("0,{:.6},{:.6},\n", e.ra_mean[0], e.ra_std[0]));
        } else {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6}\n",
                i,
                e.ra_mean[i],
                e.ra_std[i],
                e.moved_mean[i - 1]
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRow {
    pub cycle: u32,
    pub ra_mean: f64,
    pub ra_std: f64,
    pub moved_mean: Option<f64>,
}

pub fn ensemble_from_csv(text: &str) -> Result<Vec<EnsembleRow>, crate::dynamics::CsvError> {
    use crate::dynamics::CsvError;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "cycle,ra_mean,ra_std,moved_mean" {
                return Err(CsvError::Malformed {
                    line: 1,
                    msg: format!("unexpected header {line:?}"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CsvError::Malformed {
                line: i + 1,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let bad = |msg: String| CsvError::Malformed { line: i + 1, msg };
        rows.push(EnsembleRow {
            cycle: fields[0]
                .parse()
                .map_err(|_| bad(format!("bad cycle {:?}", fields[0])))?,
            ra_mean: fields[1]
                .parse()
                .map_err(|_| bad(format!("bad ra_mean {:?}", fields[1])))?,
            ra_std: fields[2]
                .parse()
                .map_err(|_| bad(format!("bad ra_std {:?}", fields[2])))?,
            moved_mean: if fields[3].is_empty() {
                None
            } else {
                Some(
                    fields[3]
                        .parse()
                        .map_err(|_| bad(format!("bad moved_mean {:?}", fields[3])))?,
                )
            },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{SimConfig, TargetChoice};
    use crate::dynamics::run_batch;
    use crate::profiles::target_b;
    use proptest::prelude::*;

    fn hf(v: Vec<i64>) -> HeightField {
        HeightField::new(v).unwrap()
    }

    #[test]
    fn ra_examples() {
        assert_eq!(roughness_ra(&hf(vec![4; 8])), 0.0);
        assert_eq!(roughness_ra(&hf(vec![1, 3])), 1.0);
        let t = target_b(10, 128).unwrap();
        let h = hf(t.heights().iter().map(|x| -x).collect());
        let ra = roughness_ra(&h);
        let expect = std::f64::consts::FRAC_2_PI;
        assert!((ra / 128.0 - expect).abs() < 0.02 * expect, "ra {ra}");
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[3.0, 3.0, 3.0], 10), vec![3.0, 3.0, 3.0]);
        assert_eq!(moving_average(&[0.0, 10.0], 2), vec![0.0, 5.0]);
        let s = [5.0, 1.0, 7.0];
        assert_eq!(moving_average(&s, 1), s.to_vec());
        assert_eq!(moving_average(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.0, 1.5, 2.5, 3.5]);
    }

    fn toy_trajs() -> Vec<Trajectory> {
        // small alternating-block target: runs halt at seed-dependent cycles
        let dir = std::env::temp_dir().join("softgrip_metrics_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toy8.txt");
        let p = crate::profiles::Profile::new(vec![1, 1, -1, -1, 1, 1, -1, -1], "toy8").unwrap();
        crate::profiles::save_profile(&p, &path).unwrap();
        let cfg = SimConfig {
            n_exp: 3,
            amplitude: 1,
            s_min: 1,
            s_max: 2,
            cycles: 300,
            runs: 6,
            target: TargetChoice::File(path),
            seed: 3,
            edge_argmax: true,
        };
        run_batch(&cfg).unwrap()
    }

    #[test]
    fn ensemble_of_one_is_identity() {
        let trajs = toy_trajs();
        let e = ensemble_mean(&trajs[..1]).unwrap();
        assert_eq!(e.ra_mean, trajs[0].ra);
        assert!(e.ra_std.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn ensemble_of_two_averages() {
        let mut a = toy_trajs().remove(0);
        let mut b = a.clone();
        a.ra = vec![2.0];
        a.scale_exp.clear();
        a.position.clear();
        a.sign.clear();
        a.moved.clear();
        b.ra = vec![4.0];
        b.scale_exp.clear();
        b.position.clear();
        b.sign.clear();
        b.moved.clear();
        let e = ensemble_mean(&[a, b]).unwrap();
        assert_eq!(e.ra_mean, vec![3.0]);
        assert_eq!(e.ra_std, vec![1.0]);
    }

    #[test]
    fn ensemble_pads_halted_runs() {
        let trajs = toy_trajs();
        let e = ensemble_mean(&trajs).unwrap();
        assert!(e.halted_runs > 0, "toy runs should halt");
        assert_eq!(e.len(), trajs.iter().map(|t| t.ra.len()).max().unwrap());
        assert!(e.ra_mean.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert_eq!(ensemble_mean(&[]), Err(MetricsError::EmptyEnsemble));
    }

    #[test]
    fn ensemble_commutes_with_moving_average() {
        let trajs = toy_trajs();
        let len = trajs.iter().map(|t| t.moved.len()).max().unwrap();
        let e = ensemble_mean(&trajs).unwrap();
        let avg_then_mean: Vec<f64> = {
            // average each padded run, then take the pointwise mean
            let per_run: Vec<Vec<f64>> = trajs
                .iter()
                .map(|t| {
                    let mut m: Vec<f64> = t.moved.iter().map(|&x| x as f64).collect();
                    m.resize(len, 0.0);
                    moving_average(&m, 10)
                })
                .collect();
            (0..len)
                .map(|i| per_run.iter().map(|r| r[i]).sum::<f64>() / per_run.len() as f64)
                .collect()
        };
        let mean_then_avg = moving_average(&e.moved_mean, 10);
        for (a, b) in avg_then_mean.iter().zip(&mean_then_avg) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn ensemble_csv_round_trip() {
        let e = ensemble_mean(&toy_trajs()).unwrap();
        let text = ensemble_to_csv(&e);
        let rows = ensemble_from_csv(&text).unwrap();
        assert_eq!(rows.len(), e.len());
        assert_eq!(rows[0].moved_mean, None);
        for (i, r) in rows.iter().enumerate() {
            assert!((r.ra_mean - e.ra_mean[i]).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn ra_translation_invariant_and_homogeneous(
            v in proptest::collection::vec(-100i64..100, 16),
            c in -50i64..50,
            k in 1i64..6,
        ) {
            let base = roughness_ra(&hf(v.clone()));
            let shifted = roughness_ra(&hf(v.iter().map(|x| x + c).collect()));
            let scaled = roughness_ra(&hf(v.iter().map(|x| x * k).collect()));
            prop_assert!((base - shifted).abs() < 1e-12);
            prop_assert!((scaled - k as f64 * base).abs() < 1e-9);
        }

        #[test]
        fn ra_zero_iff_constant(v in proptest::collection::vec(-20i64..20, 8)) {
            let ra = roughness_ra(&hf(v.clone()));
            let constant = v.iter().all(|x| *x == v[0]);
            prop_assert_eq!(ra == 0.0, constant);
        }
    }
}
