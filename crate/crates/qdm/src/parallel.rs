//! Builds `S⁻¹` coefficient by coefficient on a scoped thread pool.

use std::num::NonZeroUsize;

use qdm_core::floer::FloerModel;
use qdm_core::series::{Cutoff, LMatrix, MatrixSeries};

/// Worker count: `QDM_THREADS` if set to a positive integer, otherwise the
/// available parallelism.
pub fn thread_count() -> usize {
    std::env::var("QDM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, NonZeroUsize::get))
}

/// Same result as [`FloerModel::s_inverse_matrix`]; exponents are dealt out
/// round-robin and reassembled in box order, so the output does not depend
/// on scheduling.
pub fn s_inverse_parallel(fm: &FloerModel<'_>, cutoff: &Cutoff, threads: usize) -> qdm_core::Result<MatrixSeries> {
    let exps = cutoff.exponents();
    let threads = threads.clamp(1, exps.len().max(1));
    let mut slots: Vec<Option<qdm_core::Result<LMatrix>>> = vec![None; exps.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let exps = &exps;
                scope.spawn(move || {
                    (t..exps.len())
                        .step_by(threads)
                        .map(|i| (i, fm.s_inverse_coefficient(&exps[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, c) in h.join().expect("worker panicked") {
                slots[i] = Some(c);
            }
        }
    });
    let mut out = MatrixSeries::new(cutoff.clone());
    for (d, c) in exps.into_iter().zip(slots) {
        out.add_term(d, c.expect("every exponent assigned")?);
    }
    fm.check_bound(&out, cutoff)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdm_core::ring::CohomologyRing;
    use qdm_core::toric::examples::hirzebruch_super;
    use qdm_core::toric::LambdaMode;

    #[test]
    fn matches_sequential_build() {
        let space = hirzebruch_super();
        let ring = CohomologyRing::build(&space).unwrap();
        let fm = FloerModel::new(&space, &ring, LambdaMode::Symbolic);
        let cut = Cutoff::new(vec![2, 3]);
        let serial = fm.s_inverse_matrix(&cut).unwrap();
        for threads in [1, 3, 64] {
            assert_eq!(s_inverse_parallel(&fm, &cut, threads).unwrap(), serial);
        }
    }
}
