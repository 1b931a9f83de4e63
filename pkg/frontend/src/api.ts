/**
 * Store API client - thin fetch wrapper over the local JSON endpoints.
 *
 * All requests are same-origin relative URLs; the UI never talks to
 * anything but the store service that served it.
 */

export interface PermissionWarning {
  kind: string;
  detail: string;
  severity: "info" | "elevated";
}

export interface Manifest {
  has_action: boolean;
  extra_container_flags: string;
  needs_internet_access: boolean;
  topics_read: string[];
  topics_write: string[];
}

export interface StoreEntry {
  name: string;
  description: string;
  source_url: string;
  manifest: Manifest;
  warnings: PermissionWarning[];
  content_hash: string;
}

export class StoreClient {
  constructor(private readonly base: string = "") {}

  async listSkills(): Promise<StoreEntry[]> {
    const res = await fetch(`${this.base}/skills`);
    if (!res.ok) {
      throw new Error(await errorText(res));
    }
    const data = await res.json();
    return data.skills ?? [];
  }

  /** POST /install/<name>; resolves when the service handed out the bundle. */
  async install(name: string): Promise<void> {
    const res = await fetch(`${this.base}/install/${encodeURIComponent(name)}`, {
      method: "POST",
    });
    if (!res.ok) {
      throw new Error(await errorText(res));
    }
    await res.arrayBuffer(); // drain the archive body
  }
}

async function errorText(res: Response): Promise<string> {
  try {
    const data = await res.json();
    if (data && typeof data.error === "string") {
      return data.error;
    }
  } catch {
    // fall through to the status line
  }
  return `${res.status} ${res.statusText}`.trim();
}
