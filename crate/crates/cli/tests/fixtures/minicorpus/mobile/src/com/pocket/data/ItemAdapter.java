package com.pocket.data;

public abstract class ItemAdapter {
    public abstract int count();

    public abstract Item at(int position);
}
