//! Canonical JSON rendering: object keys sorted, no insignificant
//! whitespace, so equal values always print byte-identically and
//! outputs can be compared with `diff`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Serializes through [`serde_json::Value`], whose object maps are
/// ordered, then prints compactly — one stable byte string per value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let tree = serde_json::to_value(value)
        .map_err(|err| Error::domain(format!("value cannot be serialized: {err}")))?;
    Ok(tree.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_come_out_sorted_and_compact() {
        let scrambled = json!({"zeta": 1, "alpha": {"nested": [3, 2, 1], "aard": true}});
        assert_eq!(
            to_canonical_json(&scrambled).unwrap(),
            r#"{"alpha":{"aard":true,"nested":[3,2,1]},"zeta":1}"#
        );
    }

    #[test]
    fn round_trip_is_stable() {
        let frame = crate::frame::canonical_frame(3, 2).unwrap();
        let once = to_canonical_json(&frame).unwrap();
        let back: crate::frame::Frame = serde_json::from_str(&once).unwrap();
        assert_eq!(to_canonical_json(&back).unwrap(), once);
    }
}
