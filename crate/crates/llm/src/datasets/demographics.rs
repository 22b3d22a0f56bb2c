use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// One sex × age band × education cell with its share of the population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemographicCell {
    pub sex: String,
    pub age_group: String,
    pub education: String,
    pub weight: f64,
}

#[derive(Deserialize)]
struct Row {
    sex: String,
    age_group: String,
    education: String,
    count: f64,
}

const SAMPLE: &str = include_str!("../../data/demographics_sample.csv");

/// The shipped sample table.
pub fn bundled_demographics() -> Vec<DemographicCell> {
    parse_demographics(SAMPLE.as_bytes()).expect("bundled table is valid")
}

pub fn load_demographics(path: &Path) -> Result<Vec<DemographicCell>, DatasetError> {
    parse_demographics(std::fs::File::open(path)?)
}

/// Reads `sex,age_group,education,count` rows and normalizes counts into
/// weights. Zero-count cells are dropped.
pub fn parse_demographics<R: Read>(input: R) -> Result<Vec<DemographicCell>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| DatasetError::schema(Some(1), e.to_string()))?
        .clone();
    for want in ["sex", "age_group", "education", "count"] {
        if !headers.iter().any(|h| h == want) {
            return Err(DatasetError::schema(Some(1), format!("missing column {want:?}")));
        }
    }
    let mut rows = Vec::new();
    for (k, rec) in reader.deserialize::<Row>().enumerate() {
        let line = k + 2;
        let row = rec.map_err(|e| DatasetError::schema(Some(line), e.to_string()))?;
        if !row.count.is_finite() {
            return Err(DatasetError::schema(Some(line), "count is not a number"));
        }
        if row.count < 0.0 {
            return Err(DatasetError::NegativeCount { line, count: row.count });
        }
        if row.count > 0.0 {
            rows.push(row);
        }
    }
    let total: f64 = rows.iter().map(|r| r.count).sum();
    if total <= 0.0 {
        return Err(DatasetError::schema(None, "no cell has a positive count"));
    }
    Ok(rows
        .into_iter()
        .map(|r| DemographicCell {
            sex: r.sex,
            age_group: r.age_group,
            education: r.education,
            weight: r.count / total,
        })
        .collect())
}
