//! HTTP completion backend against a local mock endpoint.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread;

use surveyor_core::backend::{BackendError, CompletionBackend, CompletionRequest, HttpBackend};

fn find_subsequence(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack
        .windows(needle.len())
        .position(|window| window == needle)
}

/// Serves one canned (status, body) per connection and returns the raw
/// requests it saw.
fn spawn_server(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = Vec::new();
            let mut tmp = [0u8; 4096];
            let header_end = loop {
                let n = stream.read(&mut tmp).unwrap();
                buf.extend_from_slice(&tmp[..n]);
                if let Some(pos) = find_subsequence(&buf, b"\r\n\r\n") {
                    break pos + 4;
                }
            };
            let header_text = String::from_utf8_lossy(&buf[..header_end]).to_string();
            let content_length: usize = header_text
                .lines()
                .find_map(|line| {
                    line.to_ascii_lowercase()
                        .strip_prefix("content-length:")
                        .map(|v| v.trim().parse().unwrap())
                })
                .unwrap_or(0);
            while buf.len() < header_end + content_length {
                let n = stream.read(&mut tmp).unwrap();
                buf.extend_from_slice(&tmp[..n]);
            }
            seen.push(String::from_utf8_lossy(&buf).to_string());
            let reason = if status == 200 { "OK" } else { "Error" };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\nContent-Length: {}\r\nContent-Type: application/json\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(response.as_bytes()).unwrap();
        }
        seen
    });
    (format!("http://{addr}"), handle)
}

fn request(prompt: &str) -> CompletionRequest {
    CompletionRequest {
        prompt: prompt.into(),
        temperature: 0.4,
        max_tokens: 16,
        model: "test-model".into(),
        tag: Some(surveyor_core::backend::RequestTag {
            instrument_id: "hvs21".into(),
            item_id: "hvs01".into(),
            rep: 3,
        }),
    }
}

#[test]
fn returns_first_choice_untrimmed() {
    let (endpoint, handle) = spawn_server(vec![(
        200,
        r#"{"choices":[{"text":" 4"},{"text":" 5"}]}"#.into(),
    )]);
    let backend = HttpBackend::new(&endpoint, Some("test-key".into())).unwrap();
    let text = backend
        .complete(&request("Statement: x\n\nResponse: "))
        .unwrap();
    assert_eq!(text, " 4");

    let seen = handle.join().unwrap();
    assert_eq!(seen.len(), 1);
    let wire = &seen[0];
    assert!(
        wire.contains("authorization: Bearer test-key")
            || wire.contains("Authorization: Bearer test-key"),
        "{wire}"
    );
    assert!(wire.contains("\"model\":\"test-model\""));
    assert!(wire.contains("\"temperature\":0.4"));
    assert!(wire.contains("\"max_tokens\":16"));
    // Request provenance stays local; it must never reach the wire.
    assert!(!wire.contains("\"tag\""), "{wire}");
    assert!(!wire.contains("instrument_id"), "{wire}");
}

#[test]
fn non_success_status_is_reported_with_code() {
    let (endpoint, _handle) = spawn_server(vec![(500, r#"{"error":"overloaded"}"#.into())]);
    let backend = HttpBackend::new(&endpoint, Some("test-key".into())).unwrap();
    match backend.complete(&request("p")).unwrap_err() {
        BackendError::Http { status, body } => {
            assert_eq!(status, 500);
            assert!(body.contains("overloaded"));
        }
        other => panic!("expected http error, got {other}"),
    }
}

#[test]
fn rate_limit_status_is_retryable_and_client_errors_are_not() {
    let (endpoint, _handle) = spawn_server(vec![(429, "{}".into()), (400, "{}".into())]);
    let backend = HttpBackend::new(&endpoint, Some("k".into())).unwrap();
    let first = backend.complete(&request("p")).unwrap_err();
    assert!(first.retryable());
    let second = backend.complete(&request("p")).unwrap_err();
    assert!(!second.retryable());
}

#[test]
fn malformed_body_is_a_transport_error() {
    let (endpoint, _handle) = spawn_server(vec![(200, r#"{"choices":[]}"#.into())]);
    let backend = HttpBackend::new(&endpoint, Some("k".into())).unwrap();
    assert!(matches!(
        backend.complete(&request("p")).unwrap_err(),
        BackendError::Transport(_)
    ));
}

#[test]
fn missing_api_key_is_an_error_when_env_is_unset() {
    if std::env::var("SURVEYOR_API_KEY").is_ok() {
        // Environment already provides a key; nothing to assert here.
        return;
    }
    match HttpBackend::new("http://127.0.0.1:1", None) {
        Err(BackendError::MissingApiKey(var)) => assert_eq!(var, "SURVEYOR_API_KEY"),
        other => panic!("expected missing key, got {:?}", other.is_ok()),
    }
}
