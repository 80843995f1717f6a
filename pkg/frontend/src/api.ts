/** Typed client for the hbndb query service.
 *
 * The UI computes no physics: every number shown comes from these calls.
 */

import { FilterState } from "./filter-state.js";

export type ApiValue = string | number | null;

export interface ApiRecord {
  [column: string]: ApiValue;
}

export interface DefectsResponse {
  columns: string[];
  count: number;
  records: ApiRecord[];
}

export interface RescaleRequest {
  record?: number;
  tau_old_ns?: number;
  n_d_old?: number;
  n_d_new: number;
}

export interface RescaleResponse {
  record?: number;
  defect?: string;
  charge_state?: number;
  n_d_old: number;
  tau_old_ns: number;
  n_d_new: number;
  tau_new_ns: number;
}

export interface ApiError {
  error: string;
  field?: string;
}

export class ServiceError extends Error {
  readonly status: number;
  readonly field?: string;

  constructor(status: number, body: ApiError) {
    super(body.error);
    this.status = status;
    this.field = body.field;
  }
}

export function defectsQueryString(state: FilterState): string {
  const params = new URLSearchParams();
  if (state.option.length > 0) params.set("option", state.option.join(","));
  if (state.host.length > 0) params.set("host", state.host.join(","));
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

export function defectsUrl(base: string, state: FilterState): string {
  const query = defectsQueryString(state);
  return `${base}/api/v1/defects${query ? "?" + query : ""}`;
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(response.status, body as ApiError);
  }
  return body as T;
}

export async function fetchDefects(
  base: string,
  state: FilterState,
  fetchImpl: typeof fetch = fetch,
): Promise<DefectsResponse> {
  const response = await fetchImpl(defectsUrl(base, state));
  return parseOrThrow<DefectsResponse>(response);
}

export async function rescaleLifetime(
  base: string,
  request: RescaleRequest,
  fetchImpl: typeof fetch = fetch,
): Promise<RescaleResponse> {
  const response = await fetchImpl(`${base}/api/v1/lifetime/rescale`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(request),
  });
  return parseOrThrow<RescaleResponse>(response);
}

export function rawDbUrl(base: string): string {
  return `${base}/db`;
}
