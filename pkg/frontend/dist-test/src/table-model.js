/** Pure mapping from an API response to the rendered table.
 *
 * Cells reproduce the API values exactly (String() round-trips doubles),
 * so "every displayed value equals the API value" is checkable against
 * this model without a DOM. Blob columns render as a size placeholder and
 * are kept out of the default column picker.
 */
import { BLOB_OPTION_KEYS } from "./filter-state.js";
export function formatCell(column, value) {
    if (value === null || value === undefined)
        return "n/a";
    if (BLOB_OPTION_KEYS.includes(column)) {
        const text = String(value);
        return `[blob ${text.length} b64 chars]`;
    }
    return String(value);
}
export function buildTableModel(response) {
    const rows = response.records.map((record) => {
        const raw = record["_row"];
        return {
            cells: response.columns.map((c) => formatCell(c, record[c])),
            rowId: typeof raw === "number" ? raw : null,
            record,
        };
    });
    return { header: [...response.columns], rows };
}
