//! Line-delimited JSON records on stderr.

use log::{Level, LevelFilter, Log, Metadata, Record};

struct JsonLines;

impl Log for JsonLines {
    fn enabled(&self, metadata: &Metadata<'_>) -> bool {
        metadata.level() <= Level::Info
    }

    fn log(&self, record: &Record<'_>) {
        if self.enabled(record.metadata()) {
            let line = serde_json::json!({
                "event": "log",
                "level": record.level().as_str().to_ascii_lowercase(),
                "message": record.args().to_string(),
            });
            eprintln!("{line}");
        }
    }

    fn flush(&self) {}
}

static LOGGER: JsonLines = JsonLines;

pub fn init() {
    if log::set_logger(&LOGGER).is_ok() {
        log::set_max_level(LevelFilter::Info);
    }
}

/// Emits one structured record, tagging it with `event`.
pub fn emit(event: &str, mut value: serde_json::Value) {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("event".into(), event.into());
    }
    eprintln!("{value}");
}
