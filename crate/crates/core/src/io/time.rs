//! Scenario-relative timestamps.
//!
//! Datasets live on a synthetic calendar whose epoch is June 1 of year 2000
//! (day 1 of the scenario is the June 1 analogue); real dates would carry no
//! information. Timestamps render as `YYYY-MM-DDTHH:MM:SS`.

use super::IoError;

/// Days from 1970-01-01 to a civil date (Howard Hinnant's algorithm).
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = (y - era * 400) as u64;
    let mp = ((m + 9) % 12) as u64;
    let doy = (153 * mp + 2) / 5 + d as u64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe as i64 - 719_468
}

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = (z - era * 146_097) as u64;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe as i64 + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = (if mp < 10 { mp + 3 } else { mp - 9 }) as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// Seconds from 1970 to the scenario epoch, 2000-06-01T00:00:00.
fn epoch_s() -> i64 {
    days_from_civil(2000, 6, 1) * 86_400
}

/// Renders seconds-since-scenario-epoch as an ISO-8601 timestamp.
pub fn format_timestamp(seconds: u64) -> String {
    let total = epoch_s() + seconds as i64;
    let days = total.div_euclid(86_400);
    let rem = total.rem_euclid(86_400);
    let (y, m, d) = civil_from_days(days);
    format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}",
        y,
        m,
        d,
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}

/// Parses an ISO-8601 timestamp back to seconds since the scenario epoch.
pub fn parse_timestamp(s: &str) -> Result<u64, String> {
    let bytes = s.as_bytes();
    if bytes.len() != 19 || bytes[4] != b'-' || bytes[7] != b'-' || bytes[10] != b'T'
        || bytes[13] != b':' || bytes[16] != b':'
    {
        return Err(format!("timestamp {s:?} is not YYYY-MM-DDTHH:MM:SS"));
    }
    let field = |range: std::ops::Range<usize>| -> Result<i64, String> {
        s[range.clone()]
            .parse::<i64>()
            .map_err(|_| format!("timestamp {s:?}: non-numeric field at {range:?}"))
    };
    let (y, m, d) = (field(0..4)?, field(5..7)?, field(8..10)?);
    let (hh, mm, ss) = (field(11..13)?, field(14..16)?, field(17..19)?);
    if !(1..=12).contains(&m) || !(1..=31).contains(&d) || hh > 23 || mm > 59 || ss > 59 {
        return Err(format!("timestamp {s:?} has out-of-range fields"));
    }
    let abs = days_from_civil(y, m as u32, d as u32) * 86_400 + hh * 3600 + mm * 60 + ss;
    let rel = abs - epoch_s();
    if rel < 0 {
        return Err(format!("timestamp {s:?} precedes the scenario epoch"));
    }
    Ok(rel as u64)
}

/// Convenience used by writers.
pub(crate) fn timestamp_error(row: usize, e: String) -> IoError {
    IoError::BadValue {
        row,
        column: "timestamp".into(),
        detail: e,
    }
}
