//! A small in-flight evaluation window over scoped worker threads.
//!
//! The driver produces jobs and consumes results on the caller's thread;
//! `eval` runs on the workers. Results are applied in completion order.
//! With `workers <= 1` everything runs inline on the caller's thread, which
//! is the deterministic reference mode.

use crossbeam_channel::bounded;

pub(crate) trait EvalDriver {
    type Job: Send;
    type Out: Send;

    /// Produces the next job, or `None` once the budget is exhausted.
    fn next(&mut self) -> Option<Self::Job>;

    /// Applies a completed result; returning false stops the loop. Results
    /// still in flight at that point are drained unapplied.
    fn apply(&mut self, job: Self::Job, out: Self::Out) -> bool;
}

pub(crate) fn run_in_flight<D, F>(workers: usize, driver: &mut D, eval: F)
where
    D: EvalDriver,
    F: Fn(&D::Job) -> D::Out + Sync,
{
    if workers <= 1 {
        while let Some(job) = driver.next() {
            let out = eval(&job);
            if !driver.apply(job, out) {
                break;
            }
        }
        return;
    }

    std::thread::scope(|scope| {
        let (job_tx, job_rx) = bounded::<D::Job>(workers);
        let (res_tx, res_rx) = bounded::<(D::Job, D::Out)>(workers);
        let eval = &eval;
        for _ in 0..workers {
            let job_rx = job_rx.clone();
            let res_tx = res_tx.clone();
            scope.spawn(move || {
                while let Ok(job) = job_rx.recv() {
                    let out = eval(&job);
                    if res_tx.send((job, out)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(job_rx);
        drop(res_tx);

        let mut in_flight = 0usize;
        let mut accepting = true;
        while accepting && in_flight < workers {
            match driver.next() {
                Some(job) => {
                    job_tx.send(job).expect("workers alive");
                    in_flight += 1;
                }
                None => accepting = false,
            }
        }
        while in_flight > 0 {
            let (job, out) = res_rx.recv().expect("workers alive while jobs in flight");
            in_flight -= 1;
            if accepting {
                if driver.apply(job, out) {
                    match driver.next() {
                        Some(job) => {
                            job_tx.send(job).expect("workers alive");
                            in_flight += 1;
                        }
                        None => accepting = false,
                    }
                } else {
                    accepting = false;
                }
            }
        }
        drop(job_tx);
    });
}
