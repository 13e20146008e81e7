package com.pocket.app;

import com.pocket.data.Store;

public class SyncService {
    public String endpoint;
    public int retries;

    public void run() {
        for (int i = 0; i < retries; i++) {
            if (Store.instance.getRemote().getSession().getToken().isValid()) {
                return;
            }
        }
    }

    public void schedule(long delay, int attempts, boolean wifiOnly, boolean charging, String tag, String account, int flags) {
        retries = attempts;
        endpoint = tag + "@" + account;
    }
}
