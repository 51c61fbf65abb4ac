use std::time::Instant;

/// CPU time consumed by this process (all threads), in seconds.
pub fn process_cpu_seconds() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return f64::NAN;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Runs `f`, returning its result with the elapsed CPU and wall seconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64, f64) {
    let cpu = process_cpu_seconds();
    let wall = Instant::now();
    let out = f();
    let wall = wall.elapsed().as_secs_f64();
    (out, process_cpu_seconds() - cpu, wall)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpu_clock_advances_with_work() {
        let (sum, cpu, wall) = timed(|| (0..20_000_000u64).fold(0u64, |a, b| a.wrapping_add(b * b)));
        assert!(sum > 0);
        assert!(cpu > 0.0 && wall > 0.0);
    }
}
