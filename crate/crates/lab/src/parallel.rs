//! Worker pool and the data-parallel loops it runs. Results are collected in
//! input order, so they do not depend on the number of threads.

use rayon::prelude::*;

use ptlab_core::banded::BandedComplexMatrix;
use ptlab_core::pseudospectrum::{point_value, ResolventGrid, Window};
use ptlab_core::semigroup::{log10_norm_at, SemigroupCurve, OVERFLOW_LOG10};

use crate::error::{LabError, Result};

pub struct WorkerPool {
    pool: rayon::ThreadPool,
}

impl WorkerPool {
    /// `threads = 0` lets rayon pick the size.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LabError::validation(format!("cannot build worker pool: {e}")))?;
        Ok(WorkerPool { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    pub fn join<A, B, RA, RB>(&self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        self.pool.install(|| rayon::join(a, b))
    }

    /// Resolvent norms over `window`, one task per point.
    pub fn sweep(&self, a: &BandedComplexMatrix, window: &Window) -> Result<ResolventGrid> {
        window.validate()?;
        let start = std::time::Instant::now();
        let values = self.map(&window.points(), |&z| point_value(a, z)).into_iter().collect::<ptlab_core::Result<Vec<_>>>()?;
        let mut grid = ResolventGrid::from_values(window, values, a.dim())?;
        grid.sweep_seconds = start.elapsed().as_secs_f64();
        Ok(grid)
    }

    /// `log10 ‖exp(-itA)‖` at `t_j = j t_max / steps`, one task per time.
    pub fn semigroup(&self, a: &BandedComplexMatrix, t_max: f64, steps: usize) -> Result<SemigroupCurve> {
        if !(t_max > 0.0) || steps == 0 {
            return Err(LabError::validation("semigroup needs t_max > 0 and steps > 0"));
        }
        let dense = a.to_dense();
        let times: Vec<f64> = (0..=steps).map(|j| t_max * j as f64 / steps as f64).collect();
        let log10_norms = self.map(&times, |&t| log10_norm_at(&dense, t)).into_iter().collect::<ptlab_core::Result<Vec<_>>>()?;
        let overflow = log10_norms.iter().map(|&l| l > OVERFLOW_LOG10).collect();
        Ok(SemigroupCurve { matrix_dim: a.dim(), times, log10_norms, overflow })
    }
}
