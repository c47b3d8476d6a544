use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::Taxonomy;
use crate::tensor::{Dims, Tensor3};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorDoc {
    dims: [usize; 3],
    axes: Taxonomy,
    /// Row-major over (sector, agent, period).
    values: Vec<f64>,
}

/// `{"dims":[S,A,T],"axes":{...taxonomy...},"values":[...]}`.
pub fn write_tensor_json(t: &Tensor3<f64>, tax: &Taxonomy) -> Result<Vec<u8>> {
    if t.dims() != tax.dims() {
        return Err(Error::TensorJson(format!(
            "tensor dims {:?} do not match taxonomy {:?}",
            t.dims().as_array(),
            tax.dims().as_array()
        )));
    }
    let doc = TensorDoc { dims: t.dims().as_array(), axes: tax.clone(), values: t.values().to_vec() };
    let mut out = serde_json::to_vec(&doc).map_err(|e| Error::TensorJson(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn read_tensor_json(bytes: &[u8]) -> Result<(Tensor3<f64>, Taxonomy)> {
    let doc: TensorDoc = serde_json::from_slice(bytes).map_err(|e| Error::TensorJson(e.to_string()))?;
    let dims = Dims::new(doc.dims[0], doc.dims[1], doc.dims[2]);
    if dims != doc.axes.dims() {
        return Err(Error::TensorJson(format!(
            "dims {:?} disagree with axis label counts {:?}",
            doc.dims,
            doc.axes.dims().as_array()
        )));
    }
    let t = Tensor3::new(dims, doc.values).map_err(|e| Error::TensorJson(e.to_string()))?;
    Ok((t, doc.axes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tax(ns: usize) -> Taxonomy {
        Taxonomy::new((0..ns).map(|i| format!("s{i}")).collect(), vec!["household".into()], vec!["2021Q1".into()])
            .unwrap()
    }

    #[test]
    fn zero_tensor_round_trips() {
        let t = Tensor3::zeros(Dims::new(1, 1, 1)).unwrap();
        let bytes = write_tensor_json(&t, &tax(1)).unwrap();
        assert_eq!(read_tensor_json(&bytes).unwrap(), (t, tax(1)));
    }

    #[test]
    fn single_transaction_round_trips() {
        let t = Tensor3::new(Dims::new(2, 1, 1), vec![0.0, 100.0]).unwrap();
        let bytes = write_tensor_json(&t, &tax(2)).unwrap();
        assert_eq!(read_tensor_json(&bytes).unwrap().0, t);
    }

    #[test]
    fn tampered_values_rejected() {
        let t = Tensor3::new(Dims::new(2, 1, 1), vec![1.0, 2.0]).unwrap();
        let text = String::from_utf8(write_tensor_json(&t, &tax(2)).unwrap()).unwrap();
        let tampered = text.replace("[1.0,2.0]", "[1.0,2.0,3.0]");
        assert_ne!(text, tampered);
        assert!(matches!(read_tensor_json(tampered.as_bytes()), Err(Error::TensorJson(_))));
        let wrong_dims = text.replace("[2,1,1]", "[1,1,2]");
        assert!(read_tensor_json(wrong_dims.as_bytes()).is_err());
    }

    #[test]
    fn write_rejects_mismatched_taxonomy() {
        let t = Tensor3::zeros(Dims::new(2, 1, 1)).unwrap();
        assert!(write_tensor_json(&t, &tax(3)).is_err());
    }
}
