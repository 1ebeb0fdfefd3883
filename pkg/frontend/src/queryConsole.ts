// Natural-language query console: shows which schema documents were
// retrieved, lets the user edit the generated SQL before running it, and
// keeps a per-session history.

import { ApiClient, ApiError } from "./api";
import type { QueryResponse } from "./types";

export interface HistoryEntry {
  question: string;
  generatedSql: string;
  executedSql: string;
}

export class QueryConsole {
  readonly root: HTMLElement;
  readonly history: HistoryEntry[] = [];
  private questionEl!: HTMLInputElement;
  private sqlEl!: HTMLTextAreaElement;
  private schemasEl!: HTMLElement;
  private resultEl!: HTMLElement;
  private toastEl!: HTMLElement;
  private historyEl!: HTMLElement;
  private lastResponse: QueryResponse | null = null;

  constructor(private readonly api: ApiClient, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "query-console";
    this.root.innerHTML = `
      <h2>Ask the data</h2>
      <form class="question-form">
        <input class="question" placeholder="e.g. Find the top 3 most frequent destinations.">
        <select class="user-class">
          <option value="user">user</option>
          <option value="system_operator">system operator</option>
        </select>
        <button type="submit">Ask</button>
      </form>
      <div class="toast" hidden></div>
      <div class="schemas"></div>
      <label class="sql-label">Generated SQL (editable)
        <textarea class="sql" rows="3" spellcheck="false"></textarea>
      </label>
      <button class="run-sql" hidden>Run edited SQL</button>
      <div class="result"></div>
      <ol class="history"></ol>
    `;
    this.questionEl = this.root.querySelector(".question") as HTMLInputElement;
    this.sqlEl = this.root.querySelector(".sql") as HTMLTextAreaElement;
    this.schemasEl = this.root.querySelector(".schemas") as HTMLElement;
    this.resultEl = this.root.querySelector(".result") as HTMLElement;
    this.toastEl = this.root.querySelector(".toast") as HTMLElement;
    this.historyEl = this.root.querySelector(".history") as HTMLElement;
    (this.root.querySelector(".question-form") as HTMLFormElement)
      .addEventListener("submit", (event) => {
        event.preventDefault();
        void this.ask();
      });
    (this.root.querySelector(".run-sql") as HTMLButtonElement)
      .addEventListener("click", () => void this.runEdited());
  }

  async ask(): Promise<void> {
    this.toastEl.hidden = true;
    const question = this.questionEl.value.trim();
    const userClass = (this.root.querySelector(".user-class") as
      HTMLSelectElement).value;
    try {
      const response = await this.api.query({
        question,
        user_class: userClass,
      });
      this.lastResponse = response;
      this.sqlEl.value = response.generated_sql;
      (this.root.querySelector(".run-sql") as HTMLButtonElement).hidden = false;
      this.renderSchemas(response);
      this.renderResult(response.result.columns, response.result.rows);
      this.pushHistory({
        question,
        generatedSql: response.generated_sql,
        executedSql: response.generated_sql,
      });
    } catch (err) {
      if (err instanceof ApiError) {
        this.toastEl.hidden = false;
        this.toastEl.textContent = `${err.code}: ${err.message}`;
      } else {
        throw err;
      }
    }
  }

  /** Re-run with the user's edited SQL; the original stays in history. */
  async runEdited(): Promise<void> {
    if (!this.lastResponse) return;
    const edited = this.sqlEl.value.trim();
    const original = this.lastResponse.generated_sql;
    try {
      const response = await this.api.query({
        question: this.lastResponse.question,
        user_class: this.lastResponse.user_class,
        // the server executes exactly the SQL it is given
        sql: edited,
      } as never);
      this.renderResult(response.result.columns, response.result.rows);
    } catch (err) {
      if (err instanceof ApiError) {
        this.toastEl.hidden = false;
        this.toastEl.textContent = `${err.code}: ${err.message}`;
        return;
      }
      throw err;
    }
    this.pushHistory({
      question: this.lastResponse.question,
      generatedSql: original,
      executedSql: edited,
    });
  }

  private renderSchemas(response: QueryResponse): void {
    const doc = this.root.ownerDocument;
    this.schemasEl.replaceChildren();
    const heading = doc.createElement("div");
    heading.textContent = "Retrieved schemas:";
    this.schemasEl.appendChild(heading);
    for (const item of response.retrieved_schemas) {
      const chip = doc.createElement("span");
      chip.className = "schema-chip";
      chip.dataset.docId = item.doc_id;
      chip.textContent = `${item.doc_id} (${item.score.toFixed(3)})`;
      this.schemasEl.appendChild(chip);
    }
  }

  private renderResult(columns: string[], rows: unknown[][]): void {
    const doc = this.root.ownerDocument;
    const table = doc.createElement("table");
    table.className = "result-table";
    const head = doc.createElement("tr");
    for (const column of columns) {
      const th = doc.createElement("th");
      th.textContent = column;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of rows) {
      const tr = doc.createElement("tr");
      for (const value of row) {
        const td = doc.createElement("td");
        td.textContent = value === null ? "null" : String(value);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    this.resultEl.replaceChildren(table);
  }

  private pushHistory(entry: HistoryEntry): void {
    this.history.push(entry);
    const doc = this.root.ownerDocument;
    const item = doc.createElement("li");
    item.textContent = `${entry.question} -> ${entry.executedSql}`;
    this.historyEl.appendChild(item);
  }
}
