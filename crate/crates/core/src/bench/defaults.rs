//! Frozen per-environment configurations found with `bench tune` (tuning
//! seeds, master seed 0, budgets 16 to 128).

use crate::policies::{Kernel, PolicyConfig, PolicyKind};

use super::EnvKind;

fn prior(c: &mut PolicyConfig, shift: f64, variance: f64, noise_var: f64) {
    c.prior.shift = shift;
    c.prior.variance = variance;
    c.prior.noise_var = noise_var;
}

pub fn tuned_config(kind: PolicyKind, env: EnvKind) -> PolicyConfig {
    use PolicyKind::*;
    let mut c = PolicyConfig::new(kind);
    c.height = match (kind, env) {
        (Voi, _) => 1,
        (_, EnvKind::Pegs) => 2,
        _ => 4,
    };
    match env {
        EnvKind::BanditCorr => {
            prior(&mut c, 0.5, 0.5, 0.5);
            match kind {
                Uct => c.c = 4.0,
                Thompson => c.prior.variance = 1.0,
                BayesUct => c.c = 2.0,
                Voi => c.prior.variance = 0.1,
                VocPhi | VocPsi => {
                    prior(&mut c, 0.5, 0.1, 0.1);
                    if kind == VocPhi {
                        c.prior.kernel = Kernel::Rbf { scale: 1.0 };
                    }
                }
            }
        }
        EnvKind::BanditUncorr => {
            prior(&mut c, 0.5, 0.01, 0.05);
            match kind {
                Uct => c.c = 0.05,
                Thompson => c.prior.variance = 0.1,
                BayesUct => {
                    c.c = 2.0;
                    c.prior.noise_var = 0.01;
                }
                Voi => {}
                VocPhi | VocPsi => {
                    c.prior.noise_var = 0.01;
                    c.base_c = 0.05;
                }
            }
        }
        EnvKind::Pegs => {
            prior(&mut c, 2.0, 4.0, 1.0);
            c.c = 2.0;
            c.base_c = 2.0;
            match kind {
                Uct => c.c = 4.0,
                Thompson => prior(&mut c, 4.0, 1.0, 4.0),
                BayesUct | Voi => {}
                VocPhi => c.prior.kernel = Kernel::Siblings { rho: 0.5 },
                VocPsi => c.prior.shift = 1.0,
            }
        }
    }
    c
}
