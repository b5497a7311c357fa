use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use adsquake::files::SCHEMA_VERSION;

use crate::input::InputDigest;

pub enum Failure {
    /// Missing file, malformed JSON or a schema violation. Exit 2.
    Input(String),
    /// The library refused the computation. Exit 3.
    Internal(String),
}

impl From<adsquake::Error> for Failure {
    fn from(e: adsquake::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    /// Residual name to value; each is asserted against its entry in `tolerances`.
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
    pub notes: Vec<String>,
    pub result: serde_json::Value,
    /// Extra files written next to the report: name to contents.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &'static str, inputs: Vec<InputDigest>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            inputs,
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            passed: true,
            notes: Vec::new(),
            result: serde_json::Value::Null,
            artifacts: Vec::new(),
        }
    }

    /// Records a residual and whether it is within `tol`.
    pub fn check(&mut self, name: &str, value: f64, tol: f64) {
        self.residuals.insert(name.to_string(), value);
        self.tolerances.insert(name.to_string(), tol);
        self.passed &= value <= tol;
    }

    pub fn set_result<T: Serialize>(&mut self, value: &T) {
        self.result = serde_json::to_value(value).expect("report values serialize");
    }

    pub fn artifact<T: Serialize>(&mut self, name: &str, value: &T) {
        let text = serde_json::to_string_pretty(value).expect("artifacts serialize");
        self.artifacts.push((name.to_string(), text + "\n"));
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<28} {:>24} {:>12}  ok\n", "residual", "value", "tolerance");
        for (name, v) in &self.residuals {
            let tol = self.tolerances[name];
            out += &format!("{name:<28} {v:>24.17e} {tol:>12.1e}  {}\n", if *v <= tol { "yes" } else { "NO" });
        }
        out
    }

    pub fn write(&self, out: Option<&Path>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("reports serialize") + "\n";
        match out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("report.json"), text)?;
                for (name, body) in &self.artifacts {
                    fs::write(dir.join(name), body)?;
                }
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}
