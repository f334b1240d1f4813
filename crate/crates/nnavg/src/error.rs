use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot open {path}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("CSV line {line}")]
    Csv { line: usize, source: csv::Error },
    #[error(transparent)]
    CsvWrite(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid config")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] nnavg_core::Error),
    #[error("{module}: series {id:?} at time {time}")]
    Stage { module: &'static str, id: String, time: i64, source: nnavg_core::Error },
}
