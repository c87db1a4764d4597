use softgrip::config::{SimConfig, TargetChoice};
use softgrip::dynamics::{run_batch, Trajectory};

fn mean_scale_series(batch: &[Trajectory], cycles: usize) -> Vec<f64> {
    (0..cycles).map(|i| {
        batch.iter().map(|t| *t.scale_exp.get(i).unwrap_or(&t.cfg.s_min) as f64).sum::<f64>() / batch.len() as f64
    }).collect()
}
fn jumps(batch: &[Trajectory]) -> usize {
    let ms = mean_scale_series(batch, 1500);
    (100..ms.len()).filter(|&i| ms[i] > ms[i - 1] + 0.5).count()
}

fn main() {
    for seed in [1u64, 7, 42, 1234, 99999] {
        let base = SimConfig { amplitude: 48, seed, ..SimConfig::default() };
        let ba = run_batch(&SimConfig { target: TargetChoice::A, ..base.clone() }).unwrap();
        let bb = run_batch(&SimConfig { target: TargetChoice::B, ..base.clone() }).unwrap();
        let (ja, jb) = (jumps(&ba), jumps(&bb));
        println!("seed {seed}: A={ja} B={jb} ratio={:.2}", jb as f64 / ja.max(1) as f64);
        // spread check for criterion 4 at this amplitude
        let mut curves = Vec::new();
        for s_min in [2u32, 3, 4, 5] {
            let cfg = SimConfig { s_min, target: TargetChoice::B, ..base.clone() };
            curves.push(softgrip::metrics::ensemble_mean(&run_batch(&cfg).unwrap()).unwrap());
        }
        let mut worst = 0.0f64;
        for t in 0..=150usize {
            let vals: Vec<f64> = curves.iter().map(|e| e.ra_mean[t]).collect();
            let max = vals.iter().cloned().fold(f64::MIN, f64::max);
            let min = vals.iter().cloned().fold(f64::MAX, f64::min);
            let mean = vals.iter().sum::<f64>() / 4.0;
            worst = worst.max((max - min) / mean);
        }
        let finals: Vec<f64> = curves.iter().map(|e| e.ra_mean[1500]).collect();
        let ordered = finals.windows(2).all(|w| w[0] < w[1]);
        println!("  spread<=150: {worst:.4}; finals ordered={ordered} {:?}", finals.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>());
    }
}
