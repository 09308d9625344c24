//! Test support: run the binary, reach fixtures, and stand up a stub
//! sentiment service whose replies are a pure function of the request text.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::thread;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_moodmetric")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> CmdOutput {
    run_env(args, &[])
}

pub fn run_env(args: &[&str], envs: &[(&str, &str)]) -> CmdOutput {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    CmdOutput {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// The sentiment the stub service answers for a given text: a pure function
/// of the bytes, so tests can predict every cache entry.
pub fn stub_sentiment(text: &str) -> (f64, f64) {
    let sum: u64 = text.bytes().map(u64::from).sum();
    let score = (sum % 201) as f64 / 100.0 - 1.0;
    let magnitude = (sum % 17) as f64 / 4.0;
    (score, magnitude)
}

/// Starts the stub on an ephemeral port; returns its endpoint URL. The
/// server thread lives until the test process exits.
pub fn start_stub() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            match stream {
                Ok(stream) => handle(stream),
                Err(_) => break,
            }
        }
    });
    format!("http://{addr}/")
}

fn handle(stream: TcpStream) {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        if line.trim_end().is_empty() {
            break;
        }
        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = v.trim().parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    if reader.read_exact(&mut body).is_err() {
        return;
    }
    let reply = match serde_json::from_slice::<serde_json::Value>(&body)
        .ok()
        .and_then(|v| v.get("text").and_then(|t| t.as_str()).map(str::to_string))
    {
        Some(text) => {
            let (score, magnitude) = stub_sentiment(&text);
            let body = format!("{{\"score\":{score},\"magnitude\":{magnitude}}}");
            format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
        }
        None => "HTTP/1.1 400 Error\r\nContent-Length: 0\r\nConnection: close\r\n\r\n".to_string(),
    };
    let mut stream = reader.into_inner();
    let _ = stream.write_all(reply.as_bytes());
}
