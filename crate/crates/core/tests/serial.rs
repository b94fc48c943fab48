//! Kept alone in its own binary: nothing else may draw a serial first.

#[test]
fn first_serial_is_one() {
    assert_eq!(c11kit::reports::fresh_serial(), 1);
    assert_eq!(c11kit::reports::fresh_serial(), 2);
}
