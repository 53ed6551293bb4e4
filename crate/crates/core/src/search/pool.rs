//! Fixed-size worker pool over a shared task queue.
//!
//! Workers pull the next unclaimed task index from an atomic counter, so a
//! slow task never holds back the rest of the queue. Results are tagged with
//! their task index and re-sorted by the orchestrator, which keeps the output
//! independent of the schedule.

use std::any::Any;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use crate::{Error, Result};

/// Outcome of one task: the value, or the panic message if it failed twice
/// (once on a worker and once when retried on the orchestrator).
pub type TaskOutcome<R> = std::result::Result<R, String>;

fn panic_message(payload: Box<dyn Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "worker panicked".to_string()
    }
}

/// Runs `f` over every task on `workers` threads and returns the outcomes in
/// task order.
pub fn run_pool<T, R, F>(tasks: &[T], workers: usize, f: F) -> Result<Vec<TaskOutcome<R>>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be >= 1".into()));
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<TaskOutcome<R>>> = (0..tasks.len()).map(|_| None).collect();

    thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::with_capacity(workers);
        for id in 0..workers.min(tasks.len().max(1)) {
            let next = &next;
            let f = &f;
            let handle = thread::Builder::new()
                .name(format!("parima-worker-{id}"))
                .spawn_scoped(scope, move || {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks.len() {
                            break;
                        }
                        let out = catch_unwind(AssertUnwindSafe(|| f(&tasks[i])));
                        done.push((i, out.map_err(panic_message)));
                    }
                    done
                })
                .map_err(|e| Error::WorkerFailure(e.to_string()))?;
            handles.push(handle);
        }
        for handle in handles {
            // a worker that died outside a task leaves its slots empty; those
            // are retried below like any other failure
            if let Ok(done) = handle.join() {
                for (i, out) in done {
                    slots[i] = Some(out);
                }
            }
        }
        Ok(())
    })?;

    Ok(slots
        .into_iter()
        .zip(tasks)
        .map(|(slot, task)| match slot {
            Some(Ok(r)) => Ok(r),
            _ => catch_unwind(AssertUnwindSafe(|| f(task))).map_err(panic_message),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::sync::Mutex;

    #[test]
    fn preserves_task_order() {
        let tasks: Vec<u64> = (0..100).collect();
        for workers in [1, 2, 4, 8] {
            let out = run_pool(&tasks, workers, |&t| t * t).unwrap();
            let values: Vec<u64> = out.into_iter().map(|r| r.unwrap()).collect();
            assert_eq!(values, tasks.iter().map(|t| t * t).collect::<Vec<_>>());
        }
    }

    #[test]
    fn uses_named_worker_threads() {
        let names = Mutex::new(HashSet::new());
        let tasks: Vec<usize> = (0..32).collect();
        run_pool(&tasks, 3, |_| {
            let name = thread::current().name().map(str::to_string);
            names.lock().unwrap().insert(name);
            std::thread::sleep(std::time::Duration::from_millis(1));
        })
        .unwrap();
        let names = names.into_inner().unwrap();
        assert!(!names.is_empty() && names.len() <= 3);
        assert!(names.iter().all(|n| n.as_deref().unwrap().starts_with("parima-worker-")));
    }

    #[test]
    fn transient_panic_is_retried_on_orchestrator() {
        let tasks: Vec<usize> = (0..10).collect();
        let out = run_pool(&tasks, 4, |&t| {
            let on_worker = thread::current()
                .name()
                .is_some_and(|n| n.starts_with("parima-worker-"));
            if t == 3 && on_worker {
                panic!("flaky");
            }
            t + 1
        })
        .unwrap();
        assert_eq!(out[3], Ok(4));
    }

    #[test]
    fn persistent_panic_is_reported_in_place() {
        let tasks: Vec<usize> = (0..6).collect();
        let out = run_pool(&tasks, 2, |&t| {
            if t == 2 {
                panic!("broken task {t}");
            }
            t
        })
        .unwrap();
        assert_eq!(out[2], Err("broken task 2".to_string()));
        assert_eq!(out[5], Ok(5));
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(run_pool(&[1], 0, |&x: &i32| x).is_err());
    }
}
