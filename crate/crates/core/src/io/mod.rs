//! File formats and configuration.
//!
//! * `.wcsi` — binary CSI captures (complex f32 payload, f64 axes),
//! * `.wddt` — binary delay-Doppler-time tensors,
//! * TOML scene/extraction configuration,
//! * PGM/CSV spectrogram export,
//! * the key=value evaluation report.
//!
//! Both binary formats are little-endian on disk; the version field in each
//! header pins that choice.

mod config;
mod csi_file;
mod report;
mod spectrogram;
mod tensor_file;

pub use config::{
    DynamicPathConfig, ExtractionConfig, GridConfig, ImpairmentConfig, PathConfig, SceneConfig,
};
pub use csi_file::{read_csi, write_csi, CSI_MAGIC};
pub use report::EvalReport;
pub use spectrogram::{
    export_frame_csv, export_frame_pgm, export_map_csv, export_map_pgm, read_csv_grid,
};
pub use tensor_file::{read_tensor, write_tensor, TENSOR_MAGIC};
