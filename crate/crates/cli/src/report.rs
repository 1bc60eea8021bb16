use std::io::{self, Write};

use serde_json::{json, Map, Value};

/// What a command prints on stdout: either named scalar fields or a table.
#[derive(Debug, Clone)]
pub enum Report {
    Fields(Vec<(String, Value)>),
    Table {
        columns: Vec<&'static str>,
        rows: Vec<Vec<f64>>,
    },
}

impl Report {
    pub fn fields() -> FieldsBuilder {
        FieldsBuilder(Vec::new())
    }

    pub fn write<W: Write>(&self, json_mode: bool, mut out: W) -> io::Result<()> {
        match (self, json_mode) {
            (Report::Fields(fields), false) => {
                writeln!(out, "quantity,value")?;
                for (k, v) in fields {
                    match v {
                        Value::String(s) => writeln!(out, "{k},{s}")?,
                        Value::Number(n) => match n.as_f64() {
                            Some(f) if !(n.is_i64() || n.is_u64()) => writeln!(out, "{k},{f:e}")?,
                            _ => writeln!(out, "{k},{n}")?,
                        },
                        other => writeln!(out, "{k},{other}")?,
                    }
                }
            }
            (Report::Fields(fields), true) => {
                let map: Map<String, Value> = fields.iter().cloned().collect();
                serde_json::to_writer_pretty(&mut out, &Value::Object(map))?;
                writeln!(out)?;
            }
            (Report::Table { columns, rows }, false) => {
                writeln!(out, "{}", columns.join(","))?;
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            (Report::Table { columns, rows }, true) => {
                let items: Vec<Value> = rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = columns
                            .iter()
                            .zip(row)
                            .map(|(c, x)| (c.to_string(), json!(x)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut out, &items)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

pub struct FieldsBuilder(Vec<(String, Value)>);

impl FieldsBuilder {
    pub fn num(mut self, key: &str, value: f64) -> Self {
        self.0.push((key.into(), json!(value)));
        self
    }

    pub fn int(mut self, key: &str, value: u64) -> Self {
        self.0.push((key.into(), json!(value)));
        self
    }

    pub fn text(mut self, key: &str, value: impl Into<String>) -> Self {
        self.0.push((key.into(), Value::String(value.into())));
        self
    }

    pub fn push(&mut self, key: &str, value: Value) {
        self.0.push((key.into(), value));
    }

    pub fn build(self) -> Report {
        Report::Fields(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_as_csv_and_json() {
        let r = Report::fields()
            .int("dim", 3)
            .num("x", 0.5)
            .text("v", "detect")
            .build();
        let mut buf = Vec::new();
        r.write(false, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "quantity,value\ndim,3\nx,5e-1\nv,detect\n"
        );
        let mut buf = Vec::new();
        r.write(true, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["dim"], 3);
        assert_eq!(v["v"], "detect");
    }

    #[test]
    fn table_as_json() {
        let r = Report::Table {
            columns: vec!["a", "b"],
            rows: vec![vec![1.0, 2.0]],
        };
        let mut buf = Vec::new();
        r.write(true, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["b"], 2.0);
    }
}
