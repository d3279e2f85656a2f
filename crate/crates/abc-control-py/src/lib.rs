use pyo3::prelude::*;

#[pymodule]
fn abc_control_py(_py: Python<'_>, _m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
