/** Query orchestration: chip edits drive search and map refreshes.
 *
 * The controller owns the QueryState and fires exactly one search (and one
 * map refresh) per state change; an empty state renders the empty-state
 * prompt without touching the API.
 */

import { ApiClient, STALE } from "./api.js";
import {
  Chip,
  QueryState,
  addChip,
  clearAll,
  emptyQueryState,
  isEmpty,
  removeChip,
  toApiQuery,
} from "./queryState.js";
import { MapResponse, Role, SearchResponse, Suggestion } from "./types.js";

export interface ViewUpdate {
  state: QueryState;
  search: SearchResponse | null;
  map: MapResponse | null;
  emptyPrompt: boolean;
}

export class QueryController {
  private state: QueryState = emptyQueryState();

  constructor(
    private readonly client: ApiClient,
    private readonly onUpdate: (update: ViewUpdate) => void,
  ) {}

  getState(): QueryState {
    return this.state;
  }

  /** Adopt a state decoded from the URL (deep links) and refresh. */
  async restore(state: QueryState): Promise<void> {
    this.state = state;
    await this.refresh();
  }

  /** A suggestion picked in the autocomplete widget becomes a chip. */
  async selectSuggestion(role: Role, suggestion: Suggestion): Promise<void> {
    await this.applyChip(role, {
      conceptId: suggestion.concept_id,
      name: suggestion.preferred_name,
    });
  }

  /** A clicked count bar refines the query: or-mode append, dedup. */
  async clickBar(role: Role, conceptId: string, name: string): Promise<void> {
    await this.applyChip(role, { conceptId, name });
  }

  async removeChip(role: Role, conceptId: string): Promise<void> {
    this.state = removeChip(this.state, role, conceptId);
    await this.refresh();
  }

  async clearChips(): Promise<void> {
    this.state = clearAll();
    await this.refresh();
  }

  private async applyChip(role: Role, chip: Chip): Promise<void> {
    const next = addChip(this.state, role, chip);
    if (next === this.state) {
      return; // duplicate concept: no chip, no request
    }
    this.state = next;
    await this.refresh();
  }

  private async refresh(): Promise<void> {
    if (isEmpty(this.state)) {
      this.onUpdate({ state: this.state, search: null, map: null, emptyPrompt: true });
      return;
    }
    const query = toApiQuery(this.state);
    const [search, map] = await Promise.all([
      this.client.search(query),
      this.client.map(query),
    ]);
    if (search === STALE || map === STALE) {
      return; // a newer refresh is already in flight
    }
    this.onUpdate({ state: this.state, search, map, emptyPrompt: false });
  }
}
