use echo_thermo::dynamics::{moments, trotter_echoes, TrotterSteps, FullDiag};
use echo_thermo::lattice::{Lattice, TfimParams};
use echo_thermo::grid::{TimeGrid, TimeSeries};
use echo_thermo::shots::{noisify, ShotModel};
use echo_thermo::spin::SpinConfig;
use echo_thermo::wick::{adjust_moments, nnls_density, quantile_truncate, select_quantile, weight_from_density, FrequencyGrid};
use echo_thermo::beta_critical;
use num_complex::Complex;
use rayon::prelude::*;

fn damp(series: &TimeSeries<f64>, sigma: f64) -> TimeSeries<f64> {
    let factors: Vec<f64> = series.grid().times().map(|t| (-sigma * sigma * t * t / 2.0).exp()).collect();
    let values: Vec<Complex<f64>> = series.values().iter().zip(&factors).map(|(g, d)| g * d).collect();
    let re_var: Vec<f64> = series.re_var().iter().zip(&factors).map(|(v, d)| v * d * d).collect();
    let im_var: Vec<f64> = series.im_var().iter().zip(&factors).map(|(v, d)| v * d * d).collect();
    TimeSeries::with_noise(*series.grid(), values, re_var, im_var, 10_000).unwrap()
}

fn main() {
    let lat = Lattice::honeycomb10();
    let params = TfimParams::with_field(1.0f64);
    let fd = FullDiag::new(&lat, &params).unwrap();
    let beta_c: f64 = beta_critical();
    let dt = std::f64::consts::PI / 16.0;
    let n_t = 64usize;
    let grid = TimeGrid::new(dt, n_t).unwrap();
    let fgrid = FrequencyGrid::nyquist_window(dt, 256).unwrap();

    for (label, dampf, seed) in [
        ("no-damp s1", 0.0f64, 0x111u64), ("no-damp s2", 0.0, 0x222), ("no-damp s3", 0.0, 0x333),
        ("damp f=1 s1", 1.0, 0x111), ("damp f=1 s2", 1.0, 0x222),
    ] {
        let sigma = dampf * fgrid.spacing();
        let densities: Vec<_> = (0..1024u64).into_par_iter().map(|bits| {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let series = trotter_echoes(&psi, &grid, &lat, &params, TrotterSteps::MaxStep(0.25)).unwrap();
            let noisy = noisify(&series, &ShotModel::gaussian(10_000, seed ^ bits)).unwrap();
            let work = if sigma > 0.0 { damp(&noisy, sigma) } else { noisy };
            let density = nnls_density(&work, &fgrid).unwrap();
            let sel = select_quantile(&density, &work, 5.0 * n_t as f64).unwrap();
            let d = quantile_truncate(&density, sel.q).unwrap();
            let (e, s) = moments(&psi, &lat, &params).unwrap();
            adjust_moments(&d, e, s).unwrap()
        }).collect();
        print!("{label}:");
        for beta_mult in [2.0f64/3.0, 1.0, 4.0/3.0] {
            let beta = beta_mult * beta_c;
            let scale = (beta * beta * sigma * sigma / 2.0).exp();
            let w_exact = fd.boltzmann_table(beta);
            let w_pipe: Vec<f64> = densities.iter().map(|d| weight_from_density(d, beta, 0.0) / scale).collect();
            let zp: f64 = w_pipe.iter().sum();
            let ze: f64 = w_exact.iter().sum();
            let mut m2p = 0.0; let mut m2e = 0.0;
            for bits in 0..1024usize {
                let m2: f64 = SpinConfig::new(bits as u64, 10).unwrap().magnetization_sq();
                m2p += w_pipe[bits] / zp * m2;
                m2e += w_exact[bits] / ze * m2;
            }
            print!("  b={:.2}: {:+.2e}", beta, (m2p - m2e) / m2e);
        }
        println!();
    }
}
