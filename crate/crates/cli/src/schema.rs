use serde_json::{json, Value};

/// Informal schemas of the documents the commands read and write.
pub fn schemas() -> Value {
    let matrix = json!({ "type": "array", "items": { "type": "array", "items": { "type": ["integer", "string"] } } });
    let poly = json!({ "oneOf": [
        { "type": "string", "example": "t^6-1" },
        { "type": "array", "description": "coefficients, constant term first" }
    ]});
    let field = json!({ "oneOf": [
        { "type": "string", "enum": ["Q"] },
        { "type": "integer", "description": "odd prime" },
        { "type": "object", "properties": { "kind": { "enum": ["rationals", "prime"] }, "p": { "type": "integer" } } }
    ]});
    json!({
        "inputs": {
            "pencil": { "type": "object", "required": ["field", "q1", "q2"],
                        "properties": { "field": field, "n": { "type": "integer" }, "q1": matrix, "q2": matrix } },
            "curve": { "type": "object", "required": ["field", "f"], "properties": { "field": field, "f": poly } },
            "cocycle": { "type": "object", "required": ["m", "subset"],
                         "properties": { "m": { "type": "integer", "minimum": 1 },
                                         "subset": { "type": "array", "items": { "type": "integer" } } } }
        },
        "outputs": {
            "disc": { "f": poly, "degree": "integer", "full_degree": "boolean", "squarefree": "boolean" },
            "nonsingular": { "nonsingular": "boolean" },
            "diagonalize": { "field": field, "degree": "integer", "roots": "array", "vectors": "array", "diag": "array", "frobenius": "array" },
            "aut": { "level": "integer", "order": "integer", "elements": "array of root subsets" },
            "theta": { "map": "array of {class, image, in_aut_plus}", "two_torsion": "integer", "aut_plus": "integer", "equivariant": "boolean" },
            "arulwang": { "pencil": "pencil", "witness": "subspace", "basis_change": "matrix (with --conjugate)" },
            "curve-count": { "curve": "curve", "m": "integer", "count": "integer" },
            "jac-order": { "curve": "curve", "numerator": "array", "order": "integer" },
            "two-torsion": { "curve": "curve", "order": "integer", "classes": "array" },
            "isotropic": { "s": "integer", "count": "integer", "subspaces": "array (omitted with --count-only)" },
            "soluble": { "soluble": "boolean", "witness": "subspace or null" },
            "verify-jg": { "q": "integer", "I_g": "integer", "jac": "integer", "equal": "boolean" },
            "twist": { "pencil": "pencil", "cocycle": "object", "level": "integer", "scalar": "element", "delta": "element", "disc_preserved": "boolean" },
            "analyze-x": { "schema": 1, "hypotheses": "object", "bad_primes": "array", "places": "array", "point_search": "object", "consistent": "boolean", "exit_code": "integer" },
            "point-search": { "height_bound": "integer", "point": "array of decimal strings or null", "height": "integer or null", "definite_form": "boolean" },
            "error": { "error": { "kind": "string", "message": "string" } }
        },
        "exit_codes": {
            "0": "success; for analyze-x, consistent with no obstruction or open question",
            "1": "analyze-x: internal inconsistency",
            "2": "analyze-x: local obstruction found",
            "3": "analyze-x: unknown local verdicts remain",
            "4": "analyze-x: hypothesis failure",
            "64": "malformed input",
            "69": "unsupported request",
            "75": "resource bound refused the computation"
        }
    })
}
