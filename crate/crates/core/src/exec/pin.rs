//! Thread affinity. Only Linux exposes it here; elsewhere every call
//! reports [`Unsupported`].

use std::fmt;

/// The requested binding could not be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unsupported {
    pub cpu: usize,
}

impl fmt::Display for Unsupported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot bind to logical cpu {}", self.cpu)
    }
}

impl std::error::Error for Unsupported {}

/// Restricts the calling thread to logical cpu `cpu`.
#[cfg(target_os = "linux")]
pub fn pin_current_thread(cpu: usize) -> Result<(), Unsupported> {
    if cpu >= libc::CPU_SETSIZE as usize {
        return Err(Unsupported { cpu });
    }
    // SAFETY: cpu_set_t is plain data; CPU_SET is in range by the check above
    // and the pointer passed to the syscall refers to a live local.
    let ret = unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set)
    };
    if ret == 0 {
        Ok(())
    } else {
        Err(Unsupported { cpu })
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_current_thread(cpu: usize) -> Result<(), Unsupported> {
    Err(Unsupported { cpu })
}

/// Logical cpus the calling thread may currently run on.
#[cfg(target_os = "linux")]
pub fn allowed_cpus() -> Vec<usize> {
    // SAFETY: as above; the kernel fills `set` on success.
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        if libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut set) != 0 {
            return Vec::new();
        }
        (0..libc::CPU_SETSIZE as usize)
            .filter(|&c| libc::CPU_ISSET(c, &set))
            .collect()
    }
}

#[cfg(not(target_os = "linux"))]
pub fn allowed_cpus() -> Vec<usize> {
    Vec::new()
}

/// How a worker ended up bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinStatus {
    /// No binding was requested.
    Unpinned,
    Pinned(usize),
    /// Binding to this cpu failed; the worker ran wherever the OS put it.
    Failed(usize),
}
