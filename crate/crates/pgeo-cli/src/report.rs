use serde_json::{json, Value};

/// Version of the JSON report layout described by `schema/report.schema.json`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A checked claim is false.
    Failed,
    /// The model or the request is invalid.
    Error,
    /// Some symbolic verdict could not be decided.
    Undecided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Error => "error",
            Status::Undecided => "undecided",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed | Status::Error => 1,
            Status::Undecided => 2,
        }
    }

    /// The worse of two statuses.
    pub fn and(self, o: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Undecided => 1,
            Status::Failed => 2,
            Status::Error => 3,
        };
        if rank(o) > rank(self) {
            o
        } else {
            self
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub status: Status,
    pub text: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, model: &str) -> Report {
        Report {
            command: command.into(),
            model: model.into(),
            status: Status::Ok,
            text: Vec::new(),
            data: json!({}),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.data[key] = v;
    }

    pub fn status(&mut self, s: Status) {
        self.status = self.status.and(s);
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "model": self.model,
            "status": self.status.as_str(),
            "text": self.text,
            "data": self.data,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{} {}: {}\n",
            self.command,
            self.model,
            self.status.as_str()
        );
        for l in &self.text {
            out.push_str("  ");
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_combines_to_the_worst() {
        use Status::*;
        assert_eq!(Ok.and(Undecided), Undecided);
        assert_eq!(Undecided.and(Failed), Failed);
        assert_eq!(Error.and(Failed), Error);
        assert_eq!(Ok.and(Ok), Ok);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::Failed.exit_code(), 1);
        assert_eq!(Status::Error.exit_code(), 1);
        assert_eq!(Status::Undecided.exit_code(), 2);
    }

    #[test]
    fn report_renders_text_and_json() {
        let mut r = Report::new("curvature", "flat");
        r.line("flat: proved");
        r.set("flat", json!("proved"));
        r.status(Status::Undecided);
        r.status(Status::Ok);
        assert_eq!(
            r.render_text(),
            "curvature flat: undecided\n  flat: proved\n"
        );
        let j = r.to_json();
        assert_eq!(j["schema_version"], SCHEMA_VERSION);
        assert_eq!(j["status"], "undecided");
        assert_eq!(j["data"]["flat"], "proved");
    }
}
