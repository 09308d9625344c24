//! Minimal HTTP stub standing in for the external sentiment service.
//!
//! Accepts `POST` with a JSON body `{"text": ...}` and answers
//! `{"score": ..., "magnitude": ...}` derived deterministically from the
//! text, so tests can predict every reply. The server runs on a background
//! thread for the lifetime of the test process.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy)]
pub enum StubBehavior {
    /// Deterministic sentiment derived from the request text.
    Normal,
    /// Score outside [-1, 1].
    OutOfRangeScore,
    /// Body that is not JSON at all.
    NotJson,
    /// HTTP 500 with no useful body.
    ServerError,
}

#[derive(Deserialize)]
struct Request {
    text: String,
}

/// The sentiment the stub answers for a given text.
pub fn stub_sentiment(text: &str) -> (f64, f64) {
    let digest = Sha256::digest(text.as_bytes());
    let score = (f64::from(digest[0]) - 127.5) / 127.5;
    let magnitude = f64::from(digest[1]) / 64.0;
    (score, magnitude)
}

/// Starts the stub on an ephemeral port and returns its endpoint URL.
pub fn start_stub(behavior: StubBehavior) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            match stream {
                Ok(stream) => handle(stream, behavior),
                Err(_) => break,
            }
        }
    });
    format!("http://{addr}/")
}

fn handle(stream: TcpStream, behavior: StubBehavior) {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        let line = line.trim_end();
        if line.is_empty() {
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

    let reply = match behavior {
        StubBehavior::Normal => match serde_json::from_slice::<Request>(&body) {
            Ok(req) => {
                let (score, magnitude) = stub_sentiment(&req.text);
                response(200, &format!("{{\"score\":{score},\"magnitude\":{magnitude}}}"))
            }
            Err(_) => response(400, "{\"error\":\"bad request\"}"),
        },
        StubBehavior::OutOfRangeScore => response(200, "{\"score\":-1.5,\"magnitude\":1}"),
        StubBehavior::NotJson => response(200, "sentiment: mostly fine"),
        StubBehavior::ServerError => response(500, "{\"error\":\"boom\"}"),
    };
    let mut stream = reader.into_inner();
    let _ = stream.write_all(reply.as_bytes());
}

fn response(status: u16, body: &str) -> String {
    let reason = if status == 200 { "OK" } else { "Error" };
    format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
}
