use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Expected version age of every node, with the network total and mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeReport {
    pub per_node: Vec<f64>,
    pub total: f64,
    pub average: f64,
}

impl AgeReport {
    pub fn new(per_node: Vec<f64>) -> Self {
        let total: f64 = per_node.iter().sum();
        let average = total / per_node.len() as f64;
        Self {
            per_node,
            total,
            average,
        }
    }

    pub fn n(&self) -> usize {
        self.per_node.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `node_id,age` rows with 1-based node ids.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node_id", "age"])?;
        for (i, age) in self.per_node.iter().enumerate() {
            w.write_record([(i + 1).to_string(), age.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_csv() {
        let r = AgeReport::new(vec![1.0, 2.0, 4.5]);
        assert_eq!(r.total, 7.5);
        assert_eq!(r.average, 2.5);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "node_id,age\n1,1\n2,2\n3,4.5\n");
        let back: AgeReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
