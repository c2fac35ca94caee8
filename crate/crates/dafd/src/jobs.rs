//! Index-ordered fan-out for independent jobs (grid tuples, pairs, folds).
//! Results are returned in job order, so outputs do not depend on the number
//! of workers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::Result;

pub fn run_indexed_jobs<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = jobs.max(1).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let result = f(i);
                slots.lock().expect("job slots poisoned")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("job slots poisoned")
        .into_iter()
        .map(|slot| slot.expect("every job index visited"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_job_order_regardless_of_workers() {
        let serial = run_indexed_jobs(17, 1, |i| Ok(i * i)).unwrap();
        let parallel = run_indexed_jobs(17, 4, |i| Ok(i * i)).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial[4], 16);
    }

    #[test]
    fn errors_propagate() {
        let r = run_indexed_jobs(5, 2, |i| {
            if i == 3 {
                Err(crate::error::DafdError::InvalidArgument("boom".into()))
            } else {
                Ok(i)
            }
        });
        assert!(r.is_err());
    }
}
