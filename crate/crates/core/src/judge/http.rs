//! Live model endpoints over HTTP (OpenAI-style chat completions or
//! Anthropic-style messages). The API key is read from the environment
//! variable named in the judge config at construction time.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::transport::{CompletionRequest, CompletionResponse, Transport, TransportError, Usage};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiStyle {
    #[default]
    OpenaiChat,
    AnthropicMessages,
}

pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    style: ApiStyle,
    api_key: String,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("endpoint", &self.endpoint).field("style", &self.style).finish()
    }
}

impl HttpTransport {
    pub fn new(endpoint: &str, style: ApiStyle, api_key_env: &str, timeout: Duration) -> Result<Self, TransportError> {
        let api_key = std::env::var(api_key_env)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| TransportError::Credentials(format!("environment variable {api_key_env} is not set")))?;
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        Ok(HttpTransport { agent, endpoint: endpoint.to_string(), style, api_key })
    }

    /// Both styles accept the same request body.
    fn body(&self, r: &CompletionRequest) -> Value {
        json!({
            "model": r.model,
            "messages": [{"role": "user", "content": r.prompt}],
            "temperature": r.temperature,
            "max_tokens": r.max_output_tokens,
        })
    }
}

/// Pull the text and token usage out of a response body.
pub fn parse_response(style: ApiStyle, body: &Value) -> Result<CompletionResponse, TransportError> {
    let (text, usage) = match style {
        ApiStyle::OpenaiChat => {
            let text = body.pointer("/choices/0/message/content").and_then(Value::as_str);
            let usage = body.get("usage").map(|u| Usage {
                prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
                completion_tokens: u.get("completion_tokens").and_then(Value::as_u64).unwrap_or(0),
            });
            (text.map(str::to_string), usage)
        }
        ApiStyle::AnthropicMessages => {
            let text = body.get("content").and_then(Value::as_array).map(|blocks| {
                blocks
                    .iter()
                    .filter(|b| b.get("type").and_then(Value::as_str) == Some("text"))
                    .filter_map(|b| b.get("text").and_then(Value::as_str))
                    .collect::<Vec<_>>()
                    .join("")
            });
            let usage = body.get("usage").map(|u| Usage {
                prompt_tokens: u.get("input_tokens").and_then(Value::as_u64).unwrap_or(0),
                completion_tokens: u.get("output_tokens").and_then(Value::as_u64).unwrap_or(0),
            });
            (text, usage)
        }
    };
    let text = text.ok_or_else(|| TransportError::Malformed(truncate(&body.to_string())))?;
    Ok(CompletionResponse { text, usage })
}

fn truncate(s: &str) -> String {
    s.chars().take(500).collect()
}

impl Transport for HttpTransport {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, TransportError> {
        let mut req = self.agent.post(&self.endpoint).header("content-type", "application/json");
        req = match self.style {
            ApiStyle::OpenaiChat => req.header("authorization", &format!("Bearer {}", self.api_key)),
            ApiStyle::AnthropicMessages => {
                req.header("x-api-key", &self.api_key).header("anthropic-version", "2023-06-01")
            }
        };
        let mut resp = req.send_json(self.body(request)).map_err(|e| TransportError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<f64>().ok())
            .map(Duration::from_secs_f64);
        let text = resp.body_mut().read_to_string().map_err(|e| TransportError::Network(e.to_string()))?;
        if status == 429 {
            return Err(TransportError::RateLimited { retry_after });
        }
        if !(200..300).contains(&status) {
            return Err(TransportError::Http { status, body: truncate(&text) });
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| TransportError::Malformed(e.to_string()))?;
        parse_response(self.style, &body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_response_shapes() {
        let openai = json!({"choices": [{"message": {"content": "Final verdict: correct"}}], "usage": {"prompt_tokens": 10, "completion_tokens": 3}});
        let r = parse_response(ApiStyle::OpenaiChat, &openai).unwrap();
        assert_eq!(r.text, "Final verdict: correct");
        assert_eq!(r.usage, Some(Usage { prompt_tokens: 10, completion_tokens: 3 }));

        let anthropic = json!({"content": [{"type": "text", "text": "a"}, {"type": "text", "text": "b"}], "usage": {"input_tokens": 1, "output_tokens": 2}});
        let r = parse_response(ApiStyle::AnthropicMessages, &anthropic).unwrap();
        assert_eq!(r.text, "ab");
        assert!(parse_response(ApiStyle::OpenaiChat, &json!({"error": "x"})).is_err());
    }

    #[test]
    fn missing_key_is_a_credentials_error() {
        let err = HttpTransport::new(
            "http://127.0.0.1:9",
            ApiStyle::OpenaiChat,
            "BIAS_FORGE_TEST_UNSET_KEY",
            Duration::from_secs(1),
        )
        .unwrap_err();
        assert!(matches!(err, TransportError::Credentials(_)));
    }
}
