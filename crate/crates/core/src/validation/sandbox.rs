//! Running untrusted programs with a wall-clock timeout and resource limits.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub timeout: Duration,
    pub memory_limit_mb: Option<u64>,
    /// Run in a fresh network namespace (no interfaces but loopback).
    pub isolate_network: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
    /// Exit code, or `None` when killed by a signal.
    pub code: Option<i32>,
    pub signal: Option<i32>,
    pub timed_out: bool,
    pub elapsed: Duration,
}

impl RunOutcome {
    /// Comparable summary of how the process ended.
    pub fn status(&self) -> String {
        if self.timed_out {
            "timeout".into()
        } else if let Some(code) = self.code {
            format!("exit {code}")
        } else {
            format!("signal {}", self.signal.unwrap_or(0))
        }
    }
}

const PATH: &str = "/usr/local/bin:/usr/bin:/bin";

/// Run `argv` in `cwd` with `stdin`, a clean environment plus `env`, and
/// `limits`. The child leads its own process group so a timeout kills any
/// helpers it spawned too.
pub fn run(
    argv: &[String],
    cwd: &Path,
    env: &BTreeMap<String, String>,
    stdin: &[u8],
    limits: Limits,
) -> std::io::Result<RunOutcome> {
    let (program, args) = argv.split_first().ok_or_else(|| std::io::Error::other("empty command"))?;
    let mut cmd = Command::new(program);
    cmd.args(args)
        .current_dir(cwd)
        .env_clear()
        .env("PATH", PATH)
        .envs(env)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());

    // CPU limit slightly above the wall clock so the timeout is what fires.
    let cpu_secs = limits.timeout.as_secs() + 2;
    let memory = limits.memory_limit_mb.map(|mb| mb * 1024 * 1024);
    let isolate = limits.isolate_network;
    // SAFETY: only async-signal-safe libc calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            let cpu = libc::rlimit { rlim_cur: cpu_secs, rlim_max: cpu_secs };
            libc::setrlimit(libc::RLIMIT_CPU, &cpu);
            if let Some(bytes) = memory {
                let mem = libc::rlimit { rlim_cur: bytes, rlim_max: bytes };
                libc::setrlimit(libc::RLIMIT_AS, &mem);
            }
            if isolate && libc::unshare(libc::CLONE_NEWNET) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            Ok(())
        });
    }

    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let pid = child.id() as i32;

    let mut child_stdin = child.stdin.take().expect("stdin piped");
    let input = stdin.to_vec();
    let writer = thread::spawn(move || {
        // a program that exits without reading closes the pipe; ignore that
        let _ = child_stdin.write_all(&input);
    });
    let mut out_pipe = child.stdout.take().expect("stdout piped");
    let mut err_pipe = child.stderr.take().expect("stderr piped");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = out_pipe.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = err_pipe.read_to_end(&mut buf);
        buf
    });

    let deadline = start + limits.timeout;
    let mut timed_out = false;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if Instant::now() >= deadline {
            timed_out = true;
            // SAFETY: signalling our own child's process group.
            unsafe {
                libc::kill(-pid, libc::SIGKILL);
            }
            break child.wait()?;
        }
        thread::sleep(Duration::from_millis(2));
    };
    let elapsed = start.elapsed();
    // make sure grandchildren holding the pipes are gone too
    // SAFETY: as above.
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();

    use std::os::unix::process::ExitStatusExt;
    Ok(RunOutcome { stdout, stderr, code: status.code(), signal: status.signal(), timed_out, elapsed })
}
