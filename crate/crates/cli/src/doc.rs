//! Output documents. Text output is rendered from the JSON value.

use serde_json::{Map, Value};

/// How the command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    /// A computed negative answer: invalid, falsified, not central, ...
    Negative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub value: Value,
    pub verdict: Verdict,
}

impl Document {
    pub fn ok(value: Value) -> Self {
        Document {
            value,
            verdict: Verdict::Ok,
        }
    }

    pub fn verdict(value: Value, positive: bool) -> Self {
        Document {
            value,
            verdict: if positive { Verdict::Ok } else { Verdict::Negative },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Ok => 0,
            Verdict::Negative => 1,
        }
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        render(&self.value, 0, &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) if xs.iter().all(|x| x.is_number() || x.is_boolean()) => {
            Some(xs.iter().filter_map(scalar).collect::<Vec<_>>().join(", "))
        }
        _ => None,
    }
}

fn render_object(map: &Map<String, Value>, indent: usize, out: &mut String) {
    let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
    let pad = " ".repeat(indent);
    for (k, v) in map {
        match scalar(v) {
            Some(s) => {
                let gap = width - k.chars().count();
                out.push_str(&format!("{pad}{k}{}  {s}\n", " ".repeat(gap)));
            }
            None => {
                out.push_str(&format!("{pad}{k}:\n"));
                render(v, indent + 2, out);
            }
        }
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => render_object(map, indent, out),
        Value::Array(xs) => {
            for x in xs {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(x, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_is_aligned() {
        let d = Document::ok(json!({"a": 1, "long key": true, "list": [1, 2], "nested": {"x": null}, "s": ["p", "q"]}));
        assert_eq!(
            d.text(),
            "a         1\nlong key  yes\nlist      1, 2\nnested:\n  x  -\ns:\n  - p\n  - q\n"
        );
        assert_eq!(d.exit_code(), 0);
        assert_eq!(Document::verdict(json!({}), false).exit_code(), 1);
    }
}
