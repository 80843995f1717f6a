/** Filter state: the client-side mirror of the service's query surface.
 *
 * Validation duplicates the server rules on purpose so bad states are
 * caught before a request leaves the browser; the state is URL-encodable
 * for shareable views and hashes to a token used to drop stale responses.
 */
export const HOSTS = ["monolayer", "bulk"];
export const SPIN_MULTIPLICITIES = ["singlet", "doublet", "triplet"];
export const OPTICAL_SPIN_TRANSITIONS = ["up", "down"];
export const CHARGE_STATES = [-2, -1, 0, 1, 2];
export const NUMERIC_OPTION_KEYS = [
    "abs_dipole_x", "abs_dipole_y", "abs_dipole_z", "abs_visibility",
    "abs_tdm", "abs_lifetime", "abs_angle",
    "ems_dipole_x", "ems_dipole_y", "ems_dipole_z", "ems_visibility",
    "ems_tdm", "ZPL", "ZPL_nm", "lifetime", "ems_angle", "misalignment",
    "Q", "HR", "DW", "E_ground", "E_excited",
];
export const BLOB_OPTION_KEYS = [
    "structure_ground", "structure_excited", "band_ground", "band_excited",
    "PL", "raman",
];
export const OPTION_KEYS = [
    ...NUMERIC_OPTION_KEYS, ...BLOB_OPTION_KEYS,
];
export const IDENTITY_COLUMNS = [
    "host", "defect", "defect_name", "charge_state", "spin_multiplicity",
    "optical_spin_transition",
];
export const DEFAULT_REFRACTIVE_INDEX = 1.85;
export function emptyFilterState() {
    return {
        option: [],
        host: [],
        spinMultiplicity: [],
        chargeState: [],
        opticalSpinTransition: [],
        valueRange: null,
        selectedRow: null,
        refractiveIndex: DEFAULT_REFRACTIVE_INDEX,
    };
}
function unknownOf(values, allowed) {
    return values.filter((v) => !allowed.includes(v));
}
/** Same rules the server enforces; returns human-readable problems. */
export function validateFilterState(state) {
    const problems = [];
    for (const key of unknownOf(state.option, OPTION_KEYS)) {
        if (key !== "all")
            problems.push(`unknown option key: ${key}`);
    }
    if (state.option.includes("all") && state.option.length > 1) {
        problems.push("'all' cannot be combined with other options");
    }
    for (const host of unknownOf(state.host, HOSTS)) {
        problems.push(`invalid host: ${host}`);
    }
    for (const spin of unknownOf(state.spinMultiplicity, SPIN_MULTIPLICITIES)) {
        problems.push(`invalid spin_multiplicity: ${spin}`);
    }
    for (const t of unknownOf(state.opticalSpinTransition, OPTICAL_SPIN_TRANSITIONS)) {
        problems.push(`invalid optical_spin_transition: ${t}`);
    }
    for (const q of state.chargeState) {
        if (!Number.isInteger(q) || q < -2 || q > 2) {
            problems.push(`invalid charge_state: ${q}`);
        }
    }
    if (state.valueRange !== null) {
        const [lo, hi] = state.valueRange;
        if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
            problems.push("value_range bounds must be numbers");
        }
        else if (lo > hi) {
            problems.push("value_range must satisfy lo <= hi");
        }
        const numeric = state.option.filter((o) => NUMERIC_OPTION_KEYS.includes(o));
        if (numeric.length !== 1) {
            problems.push(`value_range needs exactly one numeric option, ${numeric.length} selected`);
        }
    }
    if (!(state.refractiveIndex >= 1)) {
        problems.push("refractive index must be >= 1");
    }
    return problems;
}
/** Canonical token: two states with the same filters share it. */
export function stateToken(state) {
    return JSON.stringify([
        [...state.option].sort(),
        [...state.host].sort(),
        [...state.spinMultiplicity].sort(),
        [...state.chargeState].sort((a, b) => a - b),
        [...state.opticalSpinTransition].sort(),
        state.valueRange,
    ]);
}
export function encodeFilterState(state) {
    const params = new URLSearchParams();
    const setList = (key, values) => {
        if (values.length > 0)
            params.set(key, values.join(","));
    };
    setList("option", state.option);
    setList("host", state.host);
    setList("spin_multiplicity", state.spinMultiplicity);
    setList("charge_state", state.chargeState);
    setList("optical_spin_transition", state.opticalSpinTransition);
    if (state.valueRange !== null) {
        params.set("value_range", `${state.valueRange[0]},${state.valueRange[1]}`);
    }
    if (state.selectedRow !== null) {
        params.set("row", String(state.selectedRow));
    }
    if (state.refractiveIndex !== DEFAULT_REFRACTIVE_INDEX) {
        params.set("n_d", String(state.refractiveIndex));
    }
    return params.toString();
}
export function decodeFilterState(search) {
    const params = new URLSearchParams(search);
    const list = (key) => {
        const raw = params.get(key);
        return raw ? raw.split(",").filter((s) => s.length > 0) : [];
    };
    const state = emptyFilterState();
    state.option = list("option");
    state.host = list("host");
    state.spinMultiplicity = list("spin_multiplicity");
    state.opticalSpinTransition = list("optical_spin_transition");
    state.chargeState = list("charge_state")
        .map((q) => Number.parseInt(q, 10))
        .filter((q) => Number.isFinite(q));
    const range = params.get("value_range");
    if (range !== null) {
        const parts = range.split(",").map(Number);
        if (parts.length === 2 && parts.every(Number.isFinite)) {
            state.valueRange = [parts[0], parts[1]];
        }
    }
    const row = params.get("row");
    if (row !== null && Number.isFinite(Number(row))) {
        state.selectedRow = Number(row);
    }
    const nd = params.get("n_d");
    if (nd !== null && Number.isFinite(Number(nd))) {
        state.refractiveIndex = Number(nd);
    }
    return state;
}
