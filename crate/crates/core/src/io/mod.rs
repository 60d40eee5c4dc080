//! Placement logs, SVG rendering and sweep summaries.

pub mod log;
pub mod summary;
pub mod svg;

pub use self::log::{read_log, write_log, LogError, PlacementLog, FORMAT_VERSION};
pub use summary::{write_summary_csv, SweepRow};
pub use svg::{render_svg, SvgOptions};
