/** Typed client for the hbndb query service.
 *
 * The UI computes no physics: every number shown comes from these calls.
 */
export class ServiceError extends Error {
    constructor(status, body) {
        super(body.error);
        this.status = status;
        this.field = body.field;
    }
}
export function defectsQueryString(state) {
    const params = new URLSearchParams();
    if (state.option.length > 0)
        params.set("option", state.option.join(","));
    if (state.host.length > 0)
        params.set("host", state.host.join(","));
    if (state.spinMultiplicity.length > 0) {
        params.set("spin_multiplicity", state.spinMultiplicity.join(","));
    }
    if (state.chargeState.length > 0) {
        params.set("charge_state", state.chargeState.join(","));
    }
    if (state.opticalSpinTransition.length > 0) {
        params.set("optical_spin_transition", state.opticalSpinTransition.join(","));
    }
    if (state.valueRange !== null) {
        params.set("value_range", `${state.valueRange[0]},${state.valueRange[1]}`);
    }
    return params.toString();
}
export function defectsUrl(base, state) {
    const query = defectsQueryString(state);
    return `${base}/api/v1/defects${query ? "?" + query : ""}`;
}
async function parseOrThrow(response) {
    const body = await response.json();
    if (!response.ok) {
        throw new ServiceError(response.status, body);
    }
    return body;
}
export async function fetchDefects(base, state, fetchImpl = fetch) {
    const response = await fetchImpl(defectsUrl(base, state));
    return parseOrThrow(response);
}
export async function rescaleLifetime(base, request, fetchImpl = fetch) {
    const response = await fetchImpl(`${base}/api/v1/lifetime/rescale`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
    });
    return parseOrThrow(response);
}
export function rawDbUrl(base) {
    return `${base}/db`;
}
